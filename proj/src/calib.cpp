#include "phonecal/calib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phonecal/core.hpp"
#include "phonecal/metrics.hpp"

namespace phonecal {

LogLikVector apply(const CalibrationTransform& transform,
                   const LogLikVector& llk) {
  if (static_cast<int>(transform.beta.size()) != llk.size())
    throw InvalidInput("transform beta length does not match log-likelihoods");
  LogLikVector out;
  out.values.resize(llk.size());
  for (int i = 0; i < llk.size(); ++i)
    out.values[i] = transform.alpha * llk.values[i] + transform.beta[i];
  return out;
}

// Per-trial weights equalizing class counts, matching the h_mc weighting.
static Vec class_weights(std::span<const PhoneTrial> trials, int n) {
  std::vector<int64_t> counts(n, 0);
  for (const PhoneTrial& t : trials) counts[t.true_phone] += 1;
  int active = 0;
  for (int f = 0; f < n; ++f)
    if (counts[f] > 0) ++active;
  Vec w(n, 0.0);
  for (int f = 0; f < n; ++f)
    if (counts[f] > 0) w[f] = 1.0 / (static_cast<double>(active) * counts[f]);
  return w;
}

double objective(std::span<const PhoneTrial> trials,
                 const PriorVector& eval_prior, double alpha, const Vec& beta,
                 double ridge, Vec* gradient_out) {
  const int n = eval_prior.size();
  if (static_cast<int>(beta.size()) != n)
    throw InvalidInput("beta length does not match prior");
  if (trials.empty()) throw InvalidInput("objective needs trials");

  Vec log_prior(n);
  for (int i = 0; i < n; ++i) log_prior[i] = std::log(eval_prior.values[i]);
  const Vec weight = class_weights(trials, n);

  double h = 0.0;
  Vec grad(n + 1, 0.0);
  Vec z(n), p(n);
  for (const PhoneTrial& trial : trials) {
    const Vec& lam = trial.llk.values;
    const int f = trial.true_phone;
    const double w = weight[f];
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      z[i] = alpha * lam[i] + beta[i] + log_prior[i];
      mx = std::max(mx, z[i]);
    }
    double denom = 0.0;
    for (int i = 0; i < n; ++i) {
      p[i] = std::exp(z[i] - mx);
      denom += p[i];
    }
    h += w * (mx + std::log(denom) - z[f]);
    if (gradient_out) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) {
        p[i] /= denom;
        grad[1 + i] += w * (p[i] - (i == f ? 1.0 : 0.0));
        dot += p[i] * lam[i];
      }
      grad[0] += w * (dot - lam[f]);
    }
  }

  if (ridge > 0.0) {
    h += 0.5 * ridge * (alpha - 1.0) * (alpha - 1.0);
    for (double b : beta) h += 0.5 * ridge * b * b;
    if (gradient_out) {
      grad[0] += ridge * (alpha - 1.0);
      for (int i = 0; i < n; ++i) grad[1 + i] += ridge * beta[i];
    }
  }
  if (gradient_out) *gradient_out = std::move(grad);
  return h;
}

Vec gradient(double alpha, const Vec& beta, std::span<const PhoneTrial> trials,
             const PriorVector& eval_prior, double ridge) {
  Vec g;
  objective(trials, eval_prior, alpha, beta, ridge, &g);
  return g;
}

static double max_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

FitResult fit(std::span<const PhoneTrial> trials, const PriorVector& eval_prior,
              const FitOptions& options) {
  const int n = eval_prior.size();
  {
    std::vector<int64_t> counts(n, 0);
    for (const PhoneTrial& t : trials) {
      if (t.true_phone < 0 || t.true_phone >= n)
        throw InvalidInput("trial phone index out of range");
      counts[t.true_phone] += 1;
    }
    int active = 0;
    for (int64_t c : counts)
      if (c > 0) ++active;
    if (active < 2)
      throw InvalidInput("calibration fit needs trials from >= 2 classes");
  }

  Vec x(n + 1, 0.0);
  x[0] = options.alpha0;
  if (!options.beta0.empty()) {
    if (static_cast<int>(options.beta0.size()) != n)
      throw InvalidInput("beta0 length does not match prior");
    std::copy(options.beta0.begin(), options.beta0.end(), x.begin() + 1);
  }

  auto eval = [&](const Vec& params, Vec* g) {
    Vec beta(params.begin() + 1, params.end());
    return objective(trials, eval_prior, params[0], beta, options.ridge, g);
  };

  Vec g;
  double f = eval(x, &g);
  Vec x_prev, g_prev;
  double step = 1.0 / (1.0 + max_norm(g));
  int iter = 0;
  bool converged = false;
  for (; iter < options.max_iter; ++iter) {
    if (max_norm(g) < options.tol) {
      converged = true;
      break;
    }
    if (iter > 0) {
      // Barzilai-Borwein step length, falling back to the previous step
      // when curvature along the last move is not positive.
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i <= n; ++i) {
        double s = x[i] - x_prev[i];
        double y = g[i] - g_prev[i];
        ss += s * s;
        sy += s * y;
      }
      if (sy > 0.0) step = ss / sy;
    }
    step = std::clamp(step, 1e-12, 1e8);

    double gg = 0.0;
    for (double gi : g) gg += gi * gi;
    Vec x_new(n + 1);
    double f_new = 0.0;
    double t = step;
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i <= n; ++i) x_new[i] = x[i] - t * g[i];
      f_new = eval(x_new, nullptr);
      if (f_new <= f - 1e-4 * t * gg) break;
      t *= 0.5;
    }
    step = t;
    x_prev = x;
    g_prev = g;
    x = x_new;
    f = eval(x, &g);
  }

  FitResult result;
  result.iterations = iter;
  result.converged = converged;
  result.transform.alpha = x[0];
  result.transform.beta.assign(x.begin() + 1, x.end());
  double mean = 0.0;
  for (double b : result.transform.beta) mean += b;
  mean /= n;
  for (double& b : result.transform.beta) b -= mean;
  result.alpha_nonpositive = result.transform.alpha <= 0.0;

  result.h_mc_before = h_mc(trials, eval_prior).h_mc;
  result.h_mc_after = h_mc(trials, eval_prior, &result.transform).h_mc;
  return result;
}

}  // namespace phonecal
