#include "phonecal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "phonecal/calib.hpp"
#include "phonecal/core.hpp"

namespace phonecal {

EvalReport h_mc(std::span<const PhoneTrial> trials,
                const PriorVector& eval_prior,
                const CalibrationTransform* transform) {
  if (trials.empty()) throw InvalidInput("h_mc needs at least one trial");
  const int n = eval_prior.size();
  eval_prior.validate();

  Vec penalty_sum(n, 0.0);
  std::vector<int64_t> counts(n, 0);
  for (const PhoneTrial& trial : trials) {
    if (trial.llk.size() != n)
      throw InvalidInput("trial log-likelihood length does not match prior");
    if (trial.true_phone < 0 || trial.true_phone >= n)
      throw InvalidInput("trial phone index out of range");
    LogLikVector llk =
        transform ? apply(*transform, trial.llk) : trial.llk;
    Vec post = posterior_from_loglik(llk, eval_prior);
    penalty_sum[trial.true_phone] += -std::log(post[trial.true_phone]);
    counts[trial.true_phone] += 1;
  }

  EvalReport report;
  report.eval_prior = eval_prior;
  report.class_counts = counts;
  report.per_class_penalty.assign(n, 0.0);
  double total = 0.0;
  int active = 0;
  for (int f = 0; f < n; ++f) {
    if (counts[f] > 0) {
      report.per_class_penalty[f] = penalty_sum[f] / counts[f];
      total += report.per_class_penalty[f];
      ++active;
    }
  }
  report.n_active_classes = active;
  report.h_mc = total / active;
  return report;
}

EerResult eer_from_scores(std::vector<double> target_scores,
                          std::vector<double> nontarget_scores) {
  EerResult r;
  r.n_target = static_cast<int64_t>(target_scores.size());
  r.n_nontarget = static_cast<int64_t>(nontarget_scores.size());
  if (target_scores.empty() || nontarget_scores.empty()) {
    r.degenerate = true;
    r.eer = 0.5;
    return r;
  }
  std::sort(target_scores.begin(), target_scores.end());
  std::sort(nontarget_scores.begin(), nontarget_scores.end());

  // Distinct score values of both sides, ascending; operating point j
  // corresponds to any threshold strictly between values[j-1] and values[j].
  std::vector<double> values;
  std::merge(target_scores.begin(), target_scores.end(),
             nontarget_scores.begin(), nontarget_scores.end(),
             std::back_inserter(values));
  values.erase(std::unique(values.begin(), values.end()), values.end());

  const double nt = static_cast<double>(target_scores.size());
  const double nn = static_cast<double>(nontarget_scores.size());
  double prev_miss = 0.0, prev_fa = 1.0;  // threshold below every score
  for (size_t j = 0; j <= values.size(); ++j) {
    double miss, fa;
    if (j == values.size()) {
      miss = 1.0;
      fa = 0.0;
    } else {
      // #targets < threshold and #nontargets >= threshold for a threshold
      // just above values[j-1] ... just below values[j] is determined by
      // counts relative to values[j]; take the vertex after absorbing the
      // tie group at values[j].
      double v = values[j];
      miss = (std::upper_bound(target_scores.begin(), target_scores.end(), v) -
              target_scores.begin()) /
             nt;
      fa = (nontarget_scores.end() -
            std::upper_bound(nontarget_scores.begin(), nontarget_scores.end(),
                             v)) /
           nn;
    }
    double d = miss - fa;
    if (d >= 0.0) {
      double prev_d = prev_miss - prev_fa;
      if (d == prev_d) {
        r.eer = miss;
      } else {
        double t = -prev_d / (d - prev_d);
        r.eer = (1.0 - t) * prev_miss + t * miss;
      }
      // Anti-ordered scores can push the crossing past chance level.
      r.eer = std::min(r.eer, 0.5);
      return r;
    }
    prev_miss = miss;
    prev_fa = fa;
  }
  r.eer = 0.5;  // unreachable: the final vertex always has miss - fa = 1
  return r;
}

EerResult pairwise_eer(std::span<const PhoneTrial> trials, int target,
                       int hypothesis, std::optional<int> target_stress) {
  if (target == hypothesis)
    throw InvalidInput("pairwise EER needs distinct target and hypothesis");
  std::vector<double> tgt, non;
  for (const PhoneTrial& trial : trials) {
    double s = trial.llk.values[target] - trial.llk.values[hypothesis];
    if (trial.true_phone == target &&
        (!target_stress || trial.stress == target_stress)) {
      tgt.push_back(s);
    } else if (trial.true_phone == hypothesis) {
      non.push_back(s);
    }
  }
  return eer_from_scores(std::move(tgt), std::move(non));
}

ConfusionMatrix confusion_matrix(std::span<const PhoneTrial> trials,
                                 const PhoneSet& phones,
                                 const std::vector<int>& subset,
                                 bool stress_split) {
  std::vector<int> sel = subset;
  if (sel.empty()) {
    sel.resize(phones.size());
    for (int f = 0; f < phones.size(); ++f) sel[f] = f;
  }

  ConfusionMatrix cm;
  cm.hypotheses = sel;
  for (int f : sel) {
    if (!stress_split) {
      cm.targets.push_back({f, std::nullopt});
      continue;
    }
    std::set<int> stresses;
    for (const PhoneTrial& t : trials)
      if (t.true_phone == f && t.stress) stresses.insert(*t.stress);
    if (stresses.empty()) {
      cm.targets.push_back({f, std::nullopt});
    } else {
      for (int s : stresses) cm.targets.push_back({f, s});
    }
  }

  cm.eer.resize(cm.targets.size());
  for (size_t r = 0; r < cm.targets.size(); ++r) {
    const auto& row = cm.targets[r];
    cm.eer[r].reserve(sel.size());
    for (int g : cm.hypotheses) {
      if (g == row.phone) {
        EerResult diag;
        diag.eer = 0.5;
        for (const PhoneTrial& t : trials)
          if (t.true_phone == g) ++diag.n_nontarget;
        cm.eer[r].push_back(diag);
      } else {
        cm.eer[r].push_back(pairwise_eer(trials, row.phone, g, row.stress));
      }
    }
  }
  return cm;
}

}  // namespace phonecal
