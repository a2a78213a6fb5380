#include "types.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fiberent {

BlockLaw::BlockLaw(int alphabet, int r, std::vector<double> probs, double tol)
    : n_(alphabet), r_(r), p_(std::move(probs)) {
  if (n_ < 1) throw std::invalid_argument("alphabet size must be >= 1");
  if (r_ < 1) throw std::invalid_argument("memory r must be >= 1");
  const std::int64_t expect = pow_int(n_, r_ + 1);
  if (static_cast<std::int64_t>(p_.size()) != expect)
    throw std::invalid_argument("block law has wrong length");
  double sum = 0.0;
  for (double v : p_) {
    if (v < -tol) throw std::invalid_argument("block law entry is negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > std::max(tol, 1e-9 * std::abs(sum)))
    throw std::invalid_argument("block law does not sum to 1");
}

std::int64_t SupportFace::count() const {
  std::int64_t c = 0;
  for (char v : mask) c += (v != 0);
  return c;
}

ContextMarginal context_marginal(const BlockLaw& u) {
  ContextMarginal eta{u.alphabet_size(), u.memory(), {}};
  const std::int64_t nc = u.num_contexts();
  eta.masses.assign(nc, 0.0);
  for (std::int64_t c = 0; c < nc; ++c)
    for (int a = 0; a < u.alphabet_size(); ++a) eta.masses[c] += u(c, a);
  return eta;
}

double stationarity_residual(const BlockLaw& u) {
  const int n = u.alphabet_size();
  const int r = u.memory();
  const std::int64_t nc = u.num_contexts();
  double worst = 0.0;
  for (std::int64_t c = 0; c < nc; ++c) {
    double left = 0.0, right = 0.0;
    for (int a = 0; a < n; ++a) {
      left += u.at(prepend_block(a, c, n, r));
      right += u(c, a);
    }
    worst = std::max(worst, std::abs(left - right));
  }
  return worst;
}

StationarityCheck is_stationary_consistent(const BlockLaw& u, double tol) {
  const double res = stationarity_residual(u);
  return {res <= tol, res};
}

ConditionalKernel kernel_of(const BlockLaw& u) {
  ConditionalKernel k{u.alphabet_size(), u.memory(), {}};
  const ContextMarginal eta = context_marginal(u);
  const std::int64_t nc = u.num_contexts();
  k.rows.resize(nc);
  for (std::int64_t c = 0; c < nc; ++c) {
    if (eta.masses[c] > 0.0) {
      std::vector<double> row(u.alphabet_size());
      for (int a = 0; a < u.alphabet_size(); ++a) row[a] = u(c, a) / eta.masses[c];
      k.rows[c] = std::move(row);
    }
  }
  return k;
}

BlockLaw block_law_of(const ContextMarginal& eta, const ConditionalKernel& p) {
  const int n = eta.alphabet;
  const int r = eta.r;
  const std::int64_t nc = static_cast<std::int64_t>(eta.masses.size());
  std::vector<double> u(nc * n, 0.0);
  for (std::int64_t c = 0; c < nc; ++c) {
    if (eta.masses[c] <= 0.0) continue;
    if (!p.active(c)) throw std::invalid_argument("kernel incomplete");
    for (int a = 0; a < n; ++a) u[c * n + a] = eta.masses[c] * p.row(c)[a];
  }
  return BlockLaw(n, r, std::move(u));
}

}  // namespace fiberent
