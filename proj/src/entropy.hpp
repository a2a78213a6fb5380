#pragma once

#include <vector>

#include "types.hpp"

namespace fiberent {

// All entropies are in nats; 0 log 0 = 0 throughout.

struct EntropyReport {
  double value_nats = 0.0;
  std::vector<double> per_context;  // eta(c) * H(p(.|c))
};

// Entropy rate J(u) = -sum u(c,a) log(u(c,a)/eta(c)).
EntropyReport entropy_rate(const BlockLaw& u);

// Same functional on a raw coordinate array (not necessarily a probability
// law); used by finite-difference checks and the line search.
double entropy_rate_raw(const std::vector<double>& u, int alphabet, int r);

// dJ/du(c,a) = log eta(c) - log u(c,a) on active coordinates. Throws on a
// zero coordinate ("gradient undefined at boundary").
std::vector<double> entropy_gradient(const BlockLaw& u);
std::vector<double> entropy_gradient_raw(const std::vector<double>& u, int alphabet, int r);

// I(X_0; X_r | X_1^{r-1}), clamped to >= 0; values below -1e-10 indicate an
// inconsistent input and throw. For r=1 the conditioning block is empty and
// H(X_r|X_1^{r-1}) = H(X_1).
double conditional_mutual_information(const BlockLaw& u);

// Triple-sum KL form of the same quantity; cross-check only.
double conditional_mutual_information_kl(const BlockLaw& u);

// Entropy of the next symbol given the length-(r-1) suffix block, computed
// from the right r-block marginal of u. Equals H_mu(X_r | X_1^{r-1}).
double suffix_conditional_entropy(const BlockLaw& u);

// Gap Delta_mu(u) = H_mu(X_r | X_1^{r-1}) - J(u) for u in U(mu). Throws
// "not in U(mu)" if the context marginal of u differs from mu beyond tol.
double gap_fixed_r_block(const std::vector<double>& mu, const BlockLaw& u, double tol = 1e-8);

double binary_entropy(double p);
double shannon_entropy(const std::vector<double>& p);

// Second variation of J at u along (h1, h2):
//   -sum h1 h2 / u + sum_c (rowsum h1)(rowsum h2) / eta.
// Coordinates where both directions vanish are skipped, so directions
// supported on the positive support of u are always well defined.
double hessian_bilinear_raw(const std::vector<double>& u, const std::vector<double>& h1,
                            const std::vector<double>& h2, int alphabet, int r);

}  // namespace fiberent
