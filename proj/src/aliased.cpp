#include "aliased.hpp"

#include <cmath>
#include <stdexcept>

#include "entropy.hpp"

namespace fiberent {

namespace {

void require_open(double x) {
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("open-interval parameters required");
}

}  // namespace

HiddenMatrix build_hidden_kernel(const AliasedSpec& spec) {
  require_open(spec.a);
  require_open(spec.b);
  require_open(spec.lambda);
  require_open(spec.mu_param);
  const double a = spec.a, b = spec.b, l = spec.lambda, u = spec.mu_param;
  HiddenMatrix k;
  // Rows (a0, a1, b0, b1); the two hidden copies of a visible symbol share
  // a row, which is what makes the aggregation Markov.
  k[0] = {(1 - a) * l, (1 - a) * (1 - l), a * u, a * (1 - u)};
  k[1] = k[0];
  k[2] = {b * l, b * (1 - l), (1 - b) * u, (1 - b) * (1 - u)};
  k[3] = k[2];
  return k;
}

std::vector<double> hidden_stationary(double m, double lambda, double mu_param) {
  require_open(m);
  require_open(lambda);
  require_open(mu_param);
  return {(1 - m) * lambda, (1 - m) * (1 - lambda), m * mu_param, m * (1 - mu_param)};
}

LumpabilityReport visible_kernel_of_hidden(const HiddenMatrix& k, double tol) {
  // Fibers {0,1} -> visible 0, {2,3} -> visible 1.
  LumpabilityReport rep;
  double fiber_sum[4][2];
  for (int x = 0; x < 4; ++x) {
    fiber_sum[x][0] = k[x][0] + k[x][1];
    fiber_sum[x][1] = k[x][2] + k[x][3];
  }
  for (int y = 0; y < 2; ++y)
    for (int yp = 0; yp < 2; ++yp) {
      const double d = std::abs(fiber_sum[2 * y][yp] - fiber_sum[2 * y + 1][yp]);
      rep.max_discrepancy = std::max(rep.max_discrepancy, d);
      rep.visible[y][yp] = 0.5 * (fiber_sum[2 * y][yp] + fiber_sum[2 * y + 1][yp]);
    }
  if (rep.max_discrepancy > tol) {
    rep.lumpable = false;
    throw std::domain_error("not lumpable, max discrepancy " +
                            std::to_string(rep.max_discrepancy));
  }
  return rep;
}

std::pair<double, double> fixed_mean_family(double m, double q) {
  require_open(m);
  if (!(q > 0.0 && q < std::min(m, 1.0 - m)))
    throw std::invalid_argument("flow coordinate outside open feasible interval");
  return {q / (1.0 - m), q / m};
}

double visible_entropy_h(double m, double q) {
  require_open(m);
  if (!(q > 0.0 && q < std::min(m, 1.0 - m)))
    throw std::invalid_argument("flow coordinate outside open feasible interval");
  return (1.0 - m) * binary_entropy(q / (1.0 - m)) + m * binary_entropy(q / m);
}

double visible_entropy_h_prime(double m, double q) {
  return std::log((1.0 - m - q) * (m - q) / (q * q));
}

double canonical_q_star(double m) {
  require_open(m);
  const double q = m * (1.0 - m);
  // Bisection on h' cross-checks the closed form.
  const double hi_end = std::min(m, 1.0 - m);
  double lo = 1e-12 * hi_end, hi = hi_end * (1.0 - 1e-12);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (visible_entropy_h_prime(m, mid) > 0.0 ? lo : hi) = mid;
  }
  if (std::abs(0.5 * (lo + hi) - q) > 1e-8)
    throw std::logic_error("closed form disagrees with numeric maximization");
  return q;
}

double hidden_entropy(double m, double lambda, double mu_param) {
  require_open(m);
  require_open(lambda);
  require_open(mu_param);
  return binary_entropy(m) + (1.0 - m) * binary_entropy(lambda) + m * binary_entropy(mu_param);
}

FiberNonconstancyReport fiber_nonconstancy_demo(double m) {
  require_open(m);
  FiberNonconstancyReport rep;
  rep.entropy_half = hidden_entropy(m, 0.5, 0.5);
  rep.entropy_quarter = hidden_entropy(m, 0.25, 0.25);
  rep.difference = rep.entropy_half - rep.entropy_quarter;

  const AliasedSpec half{m, m, 1.0 - m, 0.5, 0.5};
  const AliasedSpec quarter{m, m, 1.0 - m, 0.25, 0.25};
  const LumpabilityReport ph = visible_kernel_of_hidden(build_hidden_kernel(half));
  const LumpabilityReport pq = visible_kernel_of_hidden(build_hidden_kernel(quarter));
  for (int y = 0; y < 2; ++y)
    for (int yp = 0; yp < 2; ++yp)
      rep.visible_kernel_gap =
          std::max(rep.visible_kernel_gap, std::abs(ph.visible[y][yp] - pq.visible[y][yp]));
  return rep;
}

std::pair<double, double> rho_parametrization(double m, double rho) {
  require_open(m);
  const double a = m * (1.0 - rho);
  const double b = (1.0 - m) * (1.0 - rho);
  if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
    throw std::invalid_argument("persistence coordinate leaves the unit square");
  return {a, b};
}

double hidden_entropy_numeric(const HiddenMatrix& k, const std::vector<double>& pi) {
  double h = 0.0;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      if (k[x][y] > 0.0) h -= pi[x] * k[x][y] * std::log(k[x][y]);
  return h;
}

BlockLaw binary_chain_block_law(double m, double a, double b) {
  const double pi0 = 1.0 - m;
  if (std::abs(pi0 * a - m * b) > 1e-9)
    throw std::invalid_argument("transition parameters inconsistent with the mean");
  return BlockLaw(2, 1, {pi0 * (1.0 - a), pi0 * a, m * b, m * (1.0 - b)}, 1e-9);
}

}  // namespace fiberent
