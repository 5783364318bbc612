#ifndef PHONECAL_CALIB_HPP
#define PHONECAL_CALIB_HPP

#include <span>

#include "phonecal/types.hpp"

namespace phonecal {

// lambda' = alpha * lambda + beta, componentwise.
LogLikVector apply(const CalibrationTransform& transform,
                   const LogLikVector& llk);

struct FitOptions {
  double alpha0 = 1.0;
  Vec beta0;             // empty = zero vector
  double tol = 1e-7;     // gradient max-norm
  int max_iter = 500;
  double ridge = 0.0;    // optional penalty toward the identity transform
};

struct FitResult {
  CalibrationTransform transform;
  double h_mc_before = 0.0;
  double h_mc_after = 0.0;
  int iterations = 0;
  bool converged = false;
  bool alpha_nonpositive = false;  // fitted alpha <= 0, reported not clamped
};

// Class-balanced cross entropy of the transformed log-likelihoods and its
// analytic gradient, packed as [d/dalpha, d/dbeta_0 .. d/dbeta_{N-1}].
double objective(std::span<const PhoneTrial> trials,
                 const PriorVector& eval_prior, double alpha, const Vec& beta,
                 double ridge = 0.0, Vec* gradient_out = nullptr);

Vec gradient(double alpha, const Vec& beta, std::span<const PhoneTrial> trials,
             const PriorVector& eval_prior, double ridge = 0.0);

// Minimizes h_mc over (alpha, beta).  The logits are jointly linear in the
// parameters, so the objective is convex; a deterministic full-batch descent
// with Barzilai-Borwein steps and Armijo backtracking finds the optimum.
// beta is projected to zero mean after convergence.
FitResult fit(std::span<const PhoneTrial> trials, const PriorVector& eval_prior,
              const FitOptions& options = {});

}  // namespace phonecal

#endif
