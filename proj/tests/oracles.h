// Reference implementations used only by tests. They follow the textbook
// formulas directly (ordered pairs, long double, no shortcuts) so they share
// no code paths with the library.

#ifndef FOCAL_TESTS_ORACLES_H_
#define FOCAL_TESTS_ORACLES_H_

#include <cmath>
#include <cstddef>
#include <vector>

#include "focal/rubric.h"

namespace focal::oracle {

inline long double Score(const std::vector<double>& w, const ScoreTensor& t,
                         std::size_t i, std::size_t j) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < w.size(); ++k) s += static_cast<long double>(w[k]) * t(i, j, k);
  return s;
}

inline int Outcome(long double delta, long double tau) {
  if (delta == 0.0L) return 0;
  const int sign = delta > 0.0L ? 1 : -1;
  return std::fabs(delta) >= tau ? 2 * sign : sign;
}

inline std::vector<long double> Rewards(const std::vector<double>& w,
                                        const ScoreTensor& t, double tau) {
  const std::size_t g = t.group_size();
  std::vector<long double> r(g, 0.0L);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (i == j) continue;
      r[i] += Outcome(Score(w, t, i, j) - Score(w, t, j, i), tau);
    }
  }
  return r;
}

inline std::vector<long double> Softmax(const std::vector<double>& r, double temperature) {
  long double z = 0.0L;
  std::vector<long double> e(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    e[i] = std::exp(static_cast<long double>(r[i]) / temperature);
    z += e[i];
  }
  for (auto& v : e) v /= z;
  return e;
}

inline std::vector<long double> Saturation(const ScoreTensor& t,
                                           const std::vector<long double>& rho,
                                           double s_max) {
  const std::size_t g = t.group_size();
  const std::size_t k_count = t.num_criteria();
  std::vector<long double> p(k_count, 0.0L);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < g; ++i) {
      long double mean = 0.0L;
      for (std::size_t j = 0; j < g; ++j) {
        if (j != i) mean += t(i, j, k);
      }
      p[k] += rho[i] * mean / static_cast<long double>(g - 1);
    }
    p[k] /= s_max;
  }
  return p;
}

inline std::vector<long double> FocalWeights(const std::vector<long double>& p,
                                             const std::vector<double>& base,
                                             double gamma, double epsilon) {
  long double mass = 0.0L, shaped_mass = 0.0L;
  std::vector<long double> w(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    w[k] = std::pow(1.0L - p[k] + epsilon, static_cast<long double>(gamma)) * base[k];
    mass += base[k];
    shaped_mass += w[k];
  }
  for (auto& v : w) v *= mass / shaped_mass;
  return w;
}

}  // namespace focal::oracle

#endif  // FOCAL_TESTS_ORACLES_H_
