#include "phonecal/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace phonecal {

void SynthConfig::validate() const {
  if (n_phones < 2) throw InvalidInput("synth config needs n_phones >= 2");
  if (!(sigma > 0.0)) throw InvalidInput("synth config needs sigma > 0");
  if (rho < 0.0 || rho > 1.0)
    throw InvalidInput("synth config needs rho in [0,1]");
  if (n_trials_per_class < 1)
    throw InvalidInput("synth config needs n_trials_per_class >= 1");
  if (!class_means.empty()) {
    if (static_cast<int>(class_means.size()) != n_phones)
      throw InvalidInput("class_means count does not match n_phones");
    for (const Vec& m : class_means)
      if (static_cast<int>(m.size()) != dim)
        throw InvalidInput("class mean dimension does not match dim");
    for (size_t a = 0; a < class_means.size(); ++a)
      for (size_t b = a + 1; b < class_means.size(); ++b)
        if (class_means[a] == class_means[b])
          throw InvalidInput("class means must be distinct");
  }
  switch (duration.kind) {
    case DurationLaw::Kind::kFixed:
      if (duration.fixed_n < 1) throw InvalidInput("fixed duration needs n >= 1");
      break;
    case DurationLaw::Kind::kUniform:
      if (duration.uniform_min < 1 ||
          duration.uniform_max < duration.uniform_min)
        throw InvalidInput("uniform duration needs 1 <= min <= max");
      break;
    case DurationLaw::Kind::kGeometric:
      if (!(duration.geometric_p > 0.0 && duration.geometric_p <= 1.0))
        throw InvalidInput("geometric duration needs p in (0,1]");
      break;
  }
}

std::vector<Vec> SynthConfig::resolved_means() const {
  if (!class_means.empty()) return class_means;
  if (dim != 2)
    throw InvalidInput("default circle means require dim == 2");
  std::vector<Vec> means(n_phones, Vec(2, 0.0));
  for (int f = 0; f < n_phones; ++f) {
    double angle = 2.0 * std::numbers::pi * f / n_phones;
    means[f][0] = 2.0 * std::cos(angle);
    means[f][1] = 2.0 * std::sin(angle);
  }
  return means;
}

static uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

static std::mt19937_64 stream_rng(uint64_t seed, uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ (index + 1)));
}

static int draw_duration(const DurationLaw& law, std::mt19937_64& rng) {
  switch (law.kind) {
    case DurationLaw::Kind::kFixed:
      return law.fixed_n;
    case DurationLaw::Kind::kUniform: {
      std::uniform_int_distribution<int> d(law.uniform_min, law.uniform_max);
      return d(rng);
    }
    case DurationLaw::Kind::kGeometric: {
      std::geometric_distribution<int> d(law.geometric_p);
      return 1 + d(rng);
    }
  }
  return 1;
}

SynthCorpus generate(const SynthConfig& config) {
  config.validate();
  const std::vector<Vec> means = config.resolved_means();
  const int n = config.n_phones;
  const int dim = config.dim;
  const double sigma = config.sigma;
  const double two_var = 2.0 * sigma * sigma;
  const double log_norm =
      -0.5 * dim * std::log(2.0 * std::numbers::pi * sigma * sigma);
  const double w_shared = std::sqrt(config.rho);
  const double w_indep = std::sqrt(1.0 - config.rho);

  SynthCorpus corpus;
  for (int f = 0; f < n; ++f)
    corpus.phones.labels.push_back("ph" + std::to_string(f));

  const int64_t total =
      static_cast<int64_t>(n) * config.n_trials_per_class;
  corpus.trials.resize(total);
  for (int64_t k = 0; k < total; ++k) {
    const int f = static_cast<int>(k / config.n_trials_per_class);
    std::mt19937_64 rng = stream_rng(config.seed, static_cast<uint64_t>(k));
    std::normal_distribution<double> gauss(0.0, 1.0);

    SynthTrial& trial = corpus.trials[k];
    trial.true_phone = f;
    const int dur = draw_duration(config.duration, rng);
    Vec shared(dim);
    for (double& z : shared) z = gauss(rng);
    trial.frames.resize(dur);
    Vec x(dim);
    for (int t = 0; t < dur; ++t) {
      for (int d = 0; d < dim; ++d) {
        double eps = gauss(rng);
        x[d] = means[f][d] + sigma * (w_shared * shared[d] + w_indep * eps);
      }
      LogLikVector& llk = trial.frames[t];
      llk.values.resize(n);
      for (int i = 0; i < n; ++i) {
        double sq = 0.0;
        for (int d = 0; d < dim; ++d) {
          double diff = x[d] - means[i][d];
          sq += diff * diff;
        }
        llk.values[i] = log_norm - sq / two_var;
      }
    }
  }
  return corpus;
}

std::vector<PhoneTrial> pooled_trials(const SynthCorpus& corpus,
                                      PoolMethod method) {
  std::vector<PhoneTrial> trials;
  trials.reserve(corpus.trials.size());
  for (const SynthTrial& st : corpus.trials) {
    PhoneTrial t;
    t.true_phone = st.true_phone;
    t.duration = static_cast<int>(st.frames.size());
    t.llk = pool_frames(st.frames, method);
    trials.push_back(std::move(t));
  }
  return trials;
}

std::vector<PhoneTrial> shuffle_labels(std::span<const PhoneTrial> trials,
                                       uint64_t seed) {
  const size_t n = trials.size();
  if (n < 2) throw InvalidInput("label shuffle needs >= 2 trials");
  // Sattolo cycle: a uniform cyclic permutation, hence no fixed points in
  // index space.
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(splitmix64(seed));
  for (size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<size_t> d(0, i - 1);
    std::swap(perm[i], perm[d(rng)]);
  }
  std::vector<PhoneTrial> out(trials.begin(), trials.end());
  for (size_t i = 0; i < n; ++i) out[i].true_phone = trials[perm[i]].true_phone;
  return out;
}

}  // namespace phonecal
