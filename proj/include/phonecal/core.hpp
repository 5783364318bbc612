#ifndef PHONECAL_CORE_HPP
#define PHONECAL_CORE_HPP

#include "phonecal/types.hpp"

namespace phonecal {

// Default floor for exact-zero posteriors before taking the log.
constexpr double kDefaultPosteriorFloor = 1e-10;

// Row-sum slack tolerated when loading posterior matrices.
constexpr double kRowSumTolerance = 1e-4;

// Collapses pdf-id posterior columns onto base phones: out[t][f] is the sum
// of frame[t][i] over all i with map[i] == f, summed left to right.
Matrix reduce_pdf_posteriors(const FramePosteriorMatrix& frame,
                             const PdfMap& map, const PhoneSet& phones);

// Same reduction for the trained priors; a phone ending up with zero mass
// is an error (its log-likelihood would be undefined).
PriorVector reduce_pdf_priors(const PriorVector& pdf_priors, const PdfMap& map,
                              const PhoneSet& phones);

// Frame log-likelihood lambda_f = log(post_f / prior_f), with zero
// posteriors floored so the result stays finite.
LogLikVector frame_log_likelihoods(const double* phone_posterior_row, int n,
                                   const PriorVector& phone_priors,
                                   double floor = kDefaultPosteriorFloor);
LogLikVector frame_log_likelihoods(const Vec& phone_posterior_row,
                                   const PriorVector& phone_priors,
                                   double floor = kDefaultPosteriorFloor);

// Posterior p_f = pi_f exp(lambda_f) / sum_i pi_i exp(lambda_i), computed
// with a max-shift so arbitrarily large lambdas do not overflow.
Vec posterior_from_loglik(const LogLikVector& llk,
                          const PriorVector& eval_prior);

// Validates row sums against kRowSumTolerance, then renormalizes each row.
void validate_and_renormalize_rows(Matrix& m);

}  // namespace phonecal

#endif
