#include <cmath>
#include <set>

#include <doctest.h>

#include "phonecal/calib.hpp"
#include "phonecal/metrics.hpp"
#include "phonecal/synth.hpp"
#include "test_util.hpp"

using namespace phonecal;

TEST_CASE("generation is deterministic given the seed") {
  SynthConfig cfg;
  cfg.n_phones = 4;
  cfg.rho = 0.3;
  cfg.duration = DurationLaw::uniform(1, 9);
  cfg.n_trials_per_class = 50;
  cfg.seed = 1234;
  SynthCorpus a = generate(cfg);
  SynthCorpus b = generate(cfg);
  REQUIRE(a.trials.size() == b.trials.size());
  for (size_t k = 0; k < a.trials.size(); ++k) {
    CHECK(a.trials[k].true_phone == b.trials[k].true_phone);
    REQUIRE(a.trials[k].frames.size() == b.trials[k].frames.size());
    for (size_t t = 0; t < a.trials[k].frames.size(); ++t)
      CHECK(a.trials[k].frames[t].values == b.trials[k].frames[t].values);
  }
  cfg.seed = 1235;
  SynthCorpus c = generate(cfg);
  CHECK(c.trials[0].frames[0].values != a.trials[0].frames[0].values);
}

TEST_CASE("rho=1 makes all frames of a phone identical") {
  SynthConfig cfg;
  cfg.n_phones = 3;
  cfg.rho = 1.0;
  cfg.duration = DurationLaw::fixed(5);
  cfg.n_trials_per_class = 10;
  cfg.seed = 5;
  SynthCorpus corpus = generate(cfg);
  for (const SynthTrial& t : corpus.trials)
    for (size_t f = 1; f < t.frames.size(); ++f)
      for (int i = 0; i < 3; ++i)
        CHECK(t.frames[f].values[i] ==
              doctest::Approx(t.frames[0].values[i]).epsilon(1e-12));
}

TEST_CASE("single-frame trials are calibrated for any rho") {
  for (double rho : {0.0, 0.5, 1.0}) {
    SynthConfig cfg;
    cfg.n_phones = 6;
    cfg.rho = rho;
    cfg.duration = DurationLaw::fixed(1);
    cfg.n_trials_per_class = 2000;
    cfg.seed = 42;
    auto trials = pooled_trials(generate(cfg), PoolMethod::kSum);
    FitResult r = fit(trials, PriorVector::flat(6));
    CHECK(r.transform.alpha > 0.9);
    CHECK(r.transform.alpha < 1.1);
    CHECK((r.h_mc_before - r.h_mc_after) / r.h_mc_before < 0.02);
  }
}

TEST_CASE("mean beats sum before calibration under full correlation") {
  SynthConfig cfg;
  cfg.n_phones = 8;
  cfg.rho = 1.0;
  cfg.duration = DurationLaw::uniform(2, 14);
  cfg.n_trials_per_class = 500;
  cfg.seed = 7;
  SynthCorpus corpus = generate(cfg);
  PriorVector prior = PriorVector::flat(8);
  double h_sum = h_mc(pooled_trials(corpus, PoolMethod::kSum), prior).h_mc;
  double h_mean = h_mc(pooled_trials(corpus, PoolMethod::kMean), prior).h_mc;
  CHECK(h_mean < h_sum);
}

TEST_CASE("duration laws") {
  SynthConfig cfg;
  cfg.n_phones = 2;
  cfg.n_trials_per_class = 200;
  cfg.seed = 9;

  cfg.duration = DurationLaw::fixed(3);
  for (const auto& t : generate(cfg).trials) CHECK(t.frames.size() == 3);

  cfg.duration = DurationLaw::uniform(2, 5);
  std::set<size_t> seen;
  for (const auto& t : generate(cfg).trials) {
    CHECK(t.frames.size() >= 2);
    CHECK(t.frames.size() <= 5);
    seen.insert(t.frames.size());
  }
  CHECK(seen.size() == 4);

  cfg.duration = DurationLaw::geometric(0.4);
  for (const auto& t : generate(cfg).trials) CHECK(t.frames.size() >= 1);
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.n_phones = 1;
  CHECK_THROWS_AS(generate(cfg), InvalidInput);
  cfg.n_phones = 3;
  cfg.rho = 1.5;
  CHECK_THROWS_AS(generate(cfg), InvalidInput);
  cfg.rho = 0.0;
  cfg.sigma = 0.0;
  CHECK_THROWS_AS(generate(cfg), InvalidInput);
  cfg.sigma = 1.0;
  cfg.class_means = {{0, 0}, {0, 0}, {1, 1}};
  CHECK_THROWS_AS(generate(cfg), InvalidInput);
}

TEST_CASE("label shuffle") {
  SynthConfig cfg;
  cfg.n_phones = 5;
  cfg.class_means = {{4, 0}, {0, 4}, {-4, 0}, {0, -4}, {0, 0}};
  cfg.rho = 1.0;
  cfg.duration = DurationLaw::fixed(4);
  cfg.n_trials_per_class = 200;
  cfg.seed = 77;
  auto trials = pooled_trials(generate(cfg), PoolMethod::kMean);
  PriorVector prior = PriorVector::flat(5);
  double base = h_mc(trials, prior).h_mc;

  auto shuffled = shuffle_labels(trials, 2024);
  int changed = 0;
  for (size_t k = 0; k < trials.size(); ++k)
    if (shuffled[k].true_phone != trials[k].true_phone) ++changed;
  CHECK(changed > 0);
  // most labels are now wrong, so the penalty blows past the flat reference
  double wrong = h_mc(shuffled, prior).h_mc;
  CHECK(wrong > std::log(5.0));
  CHECK(wrong > base);

  // self-calibration collapses toward the flat posterior
  FitResult r = fit(shuffled, prior);
  CHECK(r.h_mc_after <= std::log(5.0) + 0.1);

  SUBCASE("frames and llk are untouched") {
    for (size_t k = 0; k < trials.size(); ++k)
      CHECK(shuffled[k].llk.values == trials[k].llk.values);
  }
  SUBCASE("shuffle is deterministic in the seed") {
    auto again = shuffle_labels(trials, 2024);
    for (size_t k = 0; k < trials.size(); ++k)
      CHECK(again[k].true_phone == shuffled[k].true_phone);
  }
  CHECK_THROWS_AS(shuffle_labels(std::vector<PhoneTrial>{}, 1), InvalidInput);
}
