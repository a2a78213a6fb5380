#pragma once

#include <array>
#include <vector>

#include "types.hpp"

namespace fiberent {

// Binary visible chain with two hidden copies of each symbol. Hidden states
// are indexed (a0, a1, b0, b1) = (0, 1, 2, 3); the observation map sends
// {a0, a1} -> 0 and {b0, b1} -> 1.
struct AliasedSpec {
  double m = 0.5;        // stationary mean of the visible chain
  double a = 0.5;        // P(0 -> 1)
  double b = 0.5;        // P(1 -> 0)
  double lambda = 0.5;   // split of visible 0 into a0
  double mu_param = 0.5; // split of visible 1 into b0
};

using HiddenMatrix = std::array<std::array<double, 4>, 4>;

HiddenMatrix build_hidden_kernel(const AliasedSpec& spec);

// ((1-m) lambda, (1-m)(1-lambda), m mu, m (1-mu)); verified K-invariant.
std::vector<double> hidden_stationary(double m, double lambda, double mu_param);

struct LumpabilityReport {
  bool lumpable = true;
  double max_discrepancy = 0.0;
  std::array<std::array<double, 2>, 2> visible;  // P(y -> y')
};

// Aggregates hidden transitions along observation fibers; errors if the
// fiber sums depend on the hidden representative.
LumpabilityReport visible_kernel_of_hidden(const HiddenMatrix& k, double tol = 1e-12);

// All (a, b) with stationary mean m: a = q/(1-m), b = q/m where q is the
// stationary probability of a 0 -> 1 step.
std::pair<double, double> fixed_mean_family(double m, double q);

// Entropy rate of the mean-m chain at joint transition mass q.
double visible_entropy_h(double m, double q);

// Derivative log((1-m-q)(m-q)/q^2); root is the entropy-maximizing q.
double visible_entropy_h_prime(double m, double q);

// q* = m(1-m); cross-checked against numeric maximization of h.
double canonical_q_star(double m);

// Entropy rate of the hidden chain at the selected visible point a = m,
// b = 1-m, where every hidden row is identical.
double hidden_entropy(double m, double lambda, double mu_param);

struct FiberNonconstancyReport {
  double entropy_half = 0.0;     // lambda = mu = 1/2
  double entropy_quarter = 0.0;  // lambda = mu = 1/4
  double difference = 0.0;
  double visible_kernel_gap = 0.0;  // sup distance between the two visible kernels
};

// Two hidden completions of the same visible chain with different hidden
// entropy rates.
FiberNonconstancyReport fiber_nonconstancy_demo(double m);

// Persistence coordinate: a = m(1-rho), b = (1-m)(1-rho); rho = 0 is the
// selected point.
std::pair<double, double> rho_parametrization(double m, double rho);

// Diagnostic: entropy rate of an arbitrary hidden chain K from its
// stationary law (not limited to the selected point).
double hidden_entropy_numeric(const HiddenMatrix& k, const std::vector<double>& pi);

// 2-block law of the binary chain with stationary mean m and P(0->1) = a,
// P(1->0) = b.
BlockLaw binary_chain_block_law(double m, double a, double b);

}  // namespace fiberent
