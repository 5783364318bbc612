#ifndef PHONECAL_METRICS_HPP
#define PHONECAL_METRICS_HPP

#include <optional>
#include <span>

#include "phonecal/types.hpp"

namespace phonecal {

// Class-balanced multiclass cross entropy in nats: mean -log posterior of
// the true class within each class, averaged over classes that have trials.
EvalReport h_mc(std::span<const PhoneTrial> trials,
                const PriorVector& eval_prior,
                const CalibrationTransform* transform = nullptr);

struct EerResult {
  double eer = 0.5;
  int64_t n_target = 0;
  int64_t n_nontarget = 0;
  bool degenerate = false;  // one side empty; eer forced to 0.5
};

// EER of a two-class score set.  The ROC is built from sorted scores with
// ties grouped; the value is taken where miss and false-alarm rates cross,
// linearly interpolated between adjacent ROC vertices.
EerResult eer_from_scores(std::vector<double> target_scores,
                          std::vector<double> nontarget_scores);

// Scores trials of class `target` against trials of class `hypothesis`
// with the log-likelihood ratio lambda_target - lambda_hypothesis.
// An optional stress filter restricts the target side only.
EerResult pairwise_eer(std::span<const PhoneTrial> trials, int target,
                       int hypothesis,
                       std::optional<int> target_stress = std::nullopt);

struct ConfusionMatrix {
  struct TargetRow {
    int phone = -1;
    std::optional<int> stress;
  };
  std::vector<TargetRow> targets;
  std::vector<int> hypotheses;  // phone indices, never stress-split
  std::vector<std::vector<EerResult>> eer;  // [target row][hypothesis col]
};

// Pairwise-EER matrix over the given phone subset (empty = all phones).
// With stress_split, one target row per (phone, stress) value observed.
ConfusionMatrix confusion_matrix(std::span<const PhoneTrial> trials,
                                 const PhoneSet& phones,
                                 const std::vector<int>& subset = {},
                                 bool stress_split = false);

}  // namespace phonecal

#endif
