#include "entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace fiberent {

namespace {
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace

double binary_entropy(double p) { return -xlogx(p) - xlogx(1.0 - p); }

double shannon_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h -= xlogx(v);
  return h;
}

double entropy_rate_raw(const std::vector<double>& u, int alphabet, int r) {
  const std::int64_t nc = pow_int(alphabet, r);
  double j = 0.0;
  for (std::int64_t c = 0; c < nc; ++c) {
    double eta = 0.0;
    for (int a = 0; a < alphabet; ++a) eta += u[c * alphabet + a];
    for (int a = 0; a < alphabet; ++a) {
      const double v = u[c * alphabet + a];
      if (v > 0.0) j -= v * std::log(v / eta);
    }
  }
  return j;
}

EntropyReport entropy_rate(const BlockLaw& u) {
  const ContextMarginal eta = context_marginal(u);
  EntropyReport rep;
  rep.per_context.assign(eta.masses.size(), 0.0);
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(eta.masses.size()); ++c) {
    double hc = 0.0;
    for (int a = 0; a < u.alphabet_size(); ++a) {
      const double v = u(c, a);
      if (v > 0.0) hc -= v * std::log(v / eta.masses[c]);
    }
    rep.per_context[c] = hc;
    rep.value_nats += hc;
  }
  return rep;
}

std::vector<double> entropy_gradient_raw(const std::vector<double>& u, int alphabet, int r) {
  const std::int64_t nc = pow_int(alphabet, r);
  std::vector<double> g(u.size(), 0.0);
  for (std::int64_t c = 0; c < nc; ++c) {
    double eta = 0.0;
    for (int a = 0; a < alphabet; ++a) eta += u[c * alphabet + a];
    for (int a = 0; a < alphabet; ++a) {
      const double v = u[c * alphabet + a];
      if (v <= 0.0) throw std::domain_error("gradient undefined at boundary");
      g[c * alphabet + a] = std::log(eta) - std::log(v);
    }
  }
  return g;
}

std::vector<double> entropy_gradient(const BlockLaw& u) {
  return entropy_gradient_raw(u.probs(), u.alphabet_size(), u.memory());
}

double suffix_conditional_entropy(const BlockLaw& u) {
  const int n = u.alphabet_size();
  const int r = u.memory();
  const std::int64_t nr = pow_int(n, r);
  // Law of (X_1,...,X_r): right r-block marginal of u.
  std::vector<double> rho(nr, 0.0);
  for (std::int64_t b = 0; b < u.size(); ++b) rho[b % nr] += u.at(b);
  double h = shannon_entropy(rho);
  if (r > 1) {
    const std::int64_t ns = pow_int(n, r - 1);
    std::vector<double> rho_prefix(ns, 0.0);
    for (std::int64_t i = 0; i < nr; ++i) rho_prefix[i / n] += rho[i];
    h -= shannon_entropy(rho_prefix);
  }
  return h;
}

double conditional_mutual_information(const BlockLaw& u) {
  const double cmi = suffix_conditional_entropy(u) - entropy_rate(u).value_nats;
  if (cmi < -1e-10) throw std::domain_error("conditional mutual information is negative");
  return cmi < 0.0 ? 0.0 : cmi;
}

double conditional_mutual_information_kl(const BlockLaw& u) {
  const int n = u.alphabet_size();
  const int r = u.memory();
  const std::int64_t ns = pow_int(n, r - 1);  // middle block X_1^{r-1}
  // Marginals over (s), (x0,s), (s,xr) with s the middle block.
  std::vector<double> ps(ns, 0.0), p_sx(ns * n, 0.0);
  for (std::int64_t b = 0; b < u.size(); ++b) {
    const std::int64_t sx = b % (ns * n);
    p_sx[sx] += u.at(b);
    ps[sx / n] += u.at(b);
  }
  // p(x0, s) is the context marginal.
  const ContextMarginal eta = context_marginal(u);
  double mi = 0.0;
  for (std::int64_t b = 0; b < u.size(); ++b) {
    const double joint = u.at(b);
    if (joint <= 0.0) continue;
    const std::int64_t ctx = b / n;           // (x0, s)
    const std::int64_t sx = b % (ns * n);     // (s, xr)
    const std::int64_t s = sx / n;
    mi += joint * std::log(joint * ps[s] / (eta.masses[ctx] * p_sx[sx]));
  }
  return mi < 0.0 && mi > -1e-10 ? 0.0 : mi;
}

double hessian_bilinear_raw(const std::vector<double>& u, const std::vector<double>& h1,
                            const std::vector<double>& h2, int alphabet, int r) {
  const std::int64_t nc = pow_int(alphabet, r);
  double acc = 0.0;
  for (std::int64_t c = 0; c < nc; ++c) {
    double eta = 0.0, s1 = 0.0, s2 = 0.0;
    for (int a = 0; a < alphabet; ++a) {
      const std::int64_t i = c * alphabet + a;
      eta += u[i];
      s1 += h1[i];
      s2 += h2[i];
      if (h1[i] == 0.0 && h2[i] == 0.0) continue;
      if (u[i] <= 0.0) throw std::domain_error("hessian undefined at zero coordinate");
      acc -= h1[i] * h2[i] / u[i];
    }
    if (s1 != 0.0 && s2 != 0.0) {
      if (eta <= 0.0) throw std::domain_error("hessian undefined at zero-mass context");
      acc += s1 * s2 / eta;
    }
  }
  return acc;
}

double gap_fixed_r_block(const std::vector<double>& mu, const BlockLaw& u, double tol) {
  const ContextMarginal eta = context_marginal(u);
  if (mu.size() != eta.masses.size()) throw std::invalid_argument("not in U(mu)");
  for (std::size_t c = 0; c < mu.size(); ++c)
    if (std::abs(mu[c] - eta.masses[c]) > tol) throw std::invalid_argument("not in U(mu)");
  return suffix_conditional_entropy(u) - entropy_rate(u).value_nats;
}

}  // namespace fiberent
