#ifndef PHONECAL_SYNTH_HPP
#define PHONECAL_SYNTH_HPP

#include <cstdint>
#include <span>

#include "phonecal/pooling.hpp"
#include "phonecal/types.hpp"

namespace phonecal {

struct DurationLaw {
  enum class Kind { kFixed, kUniform, kGeometric };
  Kind kind = Kind::kFixed;
  int fixed_n = 8;
  int uniform_min = 1;
  int uniform_max = 16;
  double geometric_p = 0.2;  // minimum duration 1

  static DurationLaw fixed(int n) { return {Kind::kFixed, n, 1, 16, 0.2}; }
  static DurationLaw uniform(int a, int b) {
    return {Kind::kUniform, 8, a, b, 0.2};
  }
  static DurationLaw geometric(double p) {
    return {Kind::kGeometric, 8, 1, 16, p};
  }
};

// Gaussian class-conditional corpus with known calibration: each frame's
// log-likelihood vector is the exact log density of the drawn feature under
// every class, so single frames are calibrated by construction.  rho couples
// the frames of one phone through a shared latent without changing the
// per-frame marginal.
struct SynthConfig {
  int n_phones = 10;
  int dim = 2;
  std::vector<Vec> class_means;  // empty = means on a circle of radius 2
  double sigma = 1.0;
  double rho = 0.0;  // inter-frame correlation in [0,1]
  DurationLaw duration;
  int n_trials_per_class = 1000;
  uint64_t seed = 0;

  void validate() const;
  std::vector<Vec> resolved_means() const;
};

struct SynthTrial {
  int true_phone = -1;
  std::vector<LogLikVector> frames;
};

struct SynthCorpus {
  PhoneSet phones;
  std::vector<SynthTrial> trials;
};

// Deterministic given config + seed; trial t draws from its own RNG stream
// derived from (seed, t), so generation order does not matter.
SynthCorpus generate(const SynthConfig& config);

// Pools every trial's frames with the given method.
std::vector<PhoneTrial> pooled_trials(const SynthCorpus& corpus,
                                      PoolMethod method);

// Permutes true-phone labels with a fixed-point-free index permutation;
// a label may still coincidentally survive when two trials share it.
std::vector<PhoneTrial> shuffle_labels(std::span<const PhoneTrial> trials,
                                       uint64_t seed);

}  // namespace phonecal

#endif
