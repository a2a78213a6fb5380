#include "closed_form.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace fiberent {

double RBlockLaw::shift_invariance_residual() const {
  if (r < 2) return 0.0;
  const std::int64_t ns = pow_int(alphabet, r - 1);
  double worst = 0.0;
  for (std::int64_t s = 0; s < ns; ++s) {
    double left = 0.0, right = 0.0;
    for (int a = 0; a < alphabet; ++a) {
      left += probs[static_cast<std::int64_t>(a) * ns + s];
      right += probs[s * alphabet + a];
    }
    worst = std::max(worst, std::abs(left - right));
  }
  return worst;
}

void RBlockLaw::validate(double tol) const {
  if (static_cast<std::int64_t>(probs.size()) != pow_int(alphabet, r))
    throw std::invalid_argument("r-block law has wrong length");
  double sum = 0.0;
  for (double v : probs) {
    if (v < -tol) throw std::invalid_argument("r-block law entry is negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > std::max(tol, 1e-9)) throw std::invalid_argument("r-block law does not sum to 1");
}

BlockLaw iid_maximizer(const std::vector<double>& pi) {
  const int n = static_cast<int>(pi.size());
  std::vector<double> u(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) u[static_cast<std::size_t>(a) * n + b] = pi[a] * pi[b];
  return BlockLaw(n, 1, std::move(u), 1e-10);
}

RBlockLaw project_shift_invariant(const RBlockLaw& mu) {
  const int n = mu.alphabet;
  const int r = mu.r;
  const std::int64_t dim = pow_int(n, r);
  const std::int64_t ns = r >= 2 ? pow_int(n, r - 1) : 0;
  const std::int64_t rows = 1 + ns;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, dim);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(rows);
  c.row(0).setOnes();
  d(0) = 1.0;
  for (std::int64_t s = 0; s < ns; ++s)
    for (int a = 0; a < n; ++a) {
      c(1 + s, s * n + a) += 1.0;
      c(1 + s, static_cast<std::int64_t>(a) * ns + s) -= 1.0;
    }
  Eigen::VectorXd x(dim);
  for (std::int64_t i = 0; i < dim; ++i) x(i) = mu.probs[i];
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(c);
  const Eigen::VectorXd corr = cod.solve(c * x - d);
  x -= corr;
  RBlockLaw out{n, r, std::vector<double>(dim)};
  for (std::int64_t i = 0; i < dim; ++i) out.probs[i] = x(i);
  return out;
}

BlockLaw markov_extension(const RBlockLaw& mu_in, NullContextRow policy, double tol,
                          bool reproject) {
  RBlockLaw mu = mu_in;
  mu.validate(1e-9);
  if (mu.shift_invariance_residual() > tol) {
    if (!reproject) throw std::invalid_argument("mu not stationary");
    mu = project_shift_invariant(mu);
  }
  const int n = mu.alphabet;
  const int r = mu.r;
  const std::int64_t nc = pow_int(n, r);
  const std::int64_t ns = pow_int(n, r - 1);

  // Suffix marginal mu(s) over A^{r-1}; the scalar 1 when r = 1.
  std::vector<double> suffix_mass(ns, 0.0);
  if (r == 1) {
    suffix_mass[0] = 1.0;
  } else {
    for (std::int64_t c = 0; c < nc; ++c) suffix_mass[c / n] += mu.probs[c];
  }

  std::vector<double> u(nc * n, 0.0);
  for (std::int64_t c = 0; c < nc; ++c) {
    if (mu.probs[c] <= 0.0) continue;
    const std::int64_t s = c % ns;  // suffix of length r-1
    for (int a = 0; a < n; ++a) {
      double q;
      if (suffix_mass[s] > 0.0) {
        const double block = r == 1 ? mu.probs[a] : mu.probs[s * n + a];
        q = block / suffix_mass[s];
      } else {
        (void)policy;
        q = 1.0 / n;
      }
      u[c * n + a] = mu.probs[c] * q;
    }
  }
  return BlockLaw(n, r, std::move(u), 1e-8);
}

BinaryFixedMean binary_fixed_mean_maximizer(double m) {
  if (m < 0.0 || m > 1.0) throw std::invalid_argument("mean must lie in [0,1]");
  BinaryFixedMean out{iid_maximizer({1.0 - m, m}), {{1.0 - m, m}, {1.0 - m, m}}};
  return out;
}

}  // namespace fiberent
