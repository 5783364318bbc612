#ifndef PHONECAL_TEST_UTIL_HPP
#define PHONECAL_TEST_UTIL_HPP

#include <random>

#include "phonecal/types.hpp"

namespace phonecal::test {

inline PhoneSet make_phones(int n) {
  PhoneSet ps;
  for (int i = 0; i < n; ++i) ps.labels.push_back("ph" + std::to_string(i));
  return ps;
}

inline Vec random_vec(std::mt19937_64& rng, int n, double lo = -3.0,
                      double hi = 3.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vec v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline Vec random_simplex_row(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> d(0.01, 1.0);
  Vec v(n);
  double sum = 0.0;
  for (double& x : v) {
    x = d(rng);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace phonecal::test

#endif
