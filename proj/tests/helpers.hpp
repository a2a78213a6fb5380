#pragma once

#include <cmath>
#include <vector>

#include "constraints.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace fiberent::testing {

inline std::vector<double> random_simplex(CounterRng& rng, int k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    w[i] = -std::log(1.0 - rng.next_uniform());
    total += w[i];
  }
  for (int i = 0; i < k; ++i) w[i] /= total;
  return w;
}

// Binary r=1 stationary family with mean m and 01-flow q, coordinates
// ordered (00, 01, 10, 11).
inline BlockLaw binary_q_law(double m, double q) {
  return BlockLaw(2, 1, {1.0 - m - q, q, q, m - q});
}

inline FeatureSet mean_feature_set(double m) {
  FeatureSet fs;
  fs.alphabet = 2;
  fs.r = 1;
  fs.features = {Feature{"mean", {0.0, 1.0, 0.0, 1.0}}};
  fs.targets = {m};
  return fs;
}

// One indicator feature per context, pinning the context marginal to eta.
inline FeatureSet context_indicator_features(int alphabet, int r,
                                             const std::vector<double>& eta) {
  FeatureSet fs;
  fs.alphabet = alphabet;
  fs.r = r;
  const std::int64_t nc = pow_int(alphabet, r);
  const std::int64_t dim = pow_int(alphabet, r + 1);
  for (std::int64_t c = 0; c < nc; ++c) {
    Feature f;
    f.name = "context_" + std::to_string(c);
    f.table.assign(dim, 0.0);
    for (int a = 0; a < alphabet; ++a) f.table[c * alphabet + a] = 1.0;
    fs.features.push_back(std::move(f));
    fs.targets.push_back(eta[c]);
  }
  return fs;
}

// 2-block law of the binary chain with P(0->1) = a, P(1->0) = b.
inline std::vector<double> binary_chain_2block(double a, double b) {
  const double pi0 = b / (a + b);
  const double pi1 = a / (a + b);
  return {pi0 * (1.0 - a), pi0 * a, pi1 * b, pi1 * (1.0 - b)};
}

inline double sup_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace fiberent::testing
