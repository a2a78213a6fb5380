#include "realization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fiberent {

namespace {

// Substream ids; fixed so paths are reproducible across versions.
constexpr std::uint64_t kStreamInitial = 0;
constexpr std::uint64_t kStreamUniform = 1;
constexpr std::uint64_t kStreamHidden = 2;

int sample_discrete(const std::vector<double>& w, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

std::int64_t draw_context(const ContextMarginal& eta, double u) {
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < eta.masses.size(); ++c) {
    acc += eta.masses[c];
    if (u < acc) return static_cast<std::int64_t>(c);
  }
  return static_cast<std::int64_t>(eta.masses.size()) - 1;
}

}  // namespace

int RandomMapping::apply(std::int64_t context, double u) const {
  const std::vector<double>& b = breakpoints[context];
  // upper_bound on half-open intervals [b_a, b_{a+1}).
  auto it = std::upper_bound(b.begin() + 1, b.end() - 1, u);
  return static_cast<int>(it - (b.begin() + 1));
}

RandomMapping build_random_mapping(const ConditionalKernel& p, InactivePolicy) {
  const std::int64_t nc = static_cast<std::int64_t>(p.rows.size());
  RandomMapping f{p.alphabet, p.r, {}};
  f.breakpoints.resize(nc);
  for (std::int64_t c = 0; c < nc; ++c) {
    std::vector<double>& b = f.breakpoints[c];
    b.assign(p.alphabet + 1, 0.0);
    if (p.active(c)) {
      const std::vector<double>& row = p.row(c);
      for (int a = 0; a < p.alphabet; ++a) b[a + 1] = b[a] + row[a];
      b[p.alphabet] = 1.0;
    } else {
      for (int a = 0; a <= p.alphabet; ++a)
        b[a] = static_cast<double>(a) / p.alphabet;
    }
  }
  return f;
}

ConditionalKernel kernel_of_mapping(const RandomMapping& f) {
  ConditionalKernel p{f.alphabet, f.r, {}};
  p.rows.resize(f.breakpoints.size());
  for (std::size_t c = 0; c < f.breakpoints.size(); ++c) {
    std::vector<double> row(f.alphabet);
    for (int a = 0; a < f.alphabet; ++a)
      row[a] = f.breakpoints[c][a + 1] - f.breakpoints[c][a];
    p.rows[c] = std::move(row);
  }
  return p;
}

SamplePath simulate(const RandomMapping& f, const ContextMarginal& eta, std::int64_t n,
                    std::uint64_t seed) {
  if (n < f.r) throw std::invalid_argument("path length below memory");
  CounterRng root(seed);
  CounterRng init = root.substream(kStreamInitial);
  CounterRng us = root.substream(kStreamUniform);

  SamplePath path;
  path.seed = seed;
  path.r = f.r;
  path.symbols.reserve(n);

  std::int64_t context = draw_context(eta, init.next_uniform());
  const std::int64_t nr1 = pow_int(f.alphabet, f.r - 1);
  for (int i = f.r - 1; i >= 0; --i)
    path.symbols.push_back(static_cast<int>((context / pow_int(f.alphabet, i)) % f.alphabet));
  for (std::int64_t t = f.r; t < n; ++t) {
    const int a = f.apply(context, us.next_uniform());
    path.symbols.push_back(a);
    context = (context % nr1) * f.alphabet + a;
  }
  return path;
}

double HiddenAction::apply(int z, double u) const {
  double v = u + thetas[z];
  if (v >= 1.0) v -= 1.0;
  return v;
}

HiddenSimResult simulate_with_hidden_action(const RandomMapping& f, const ContextMarginal& eta,
                                            const HiddenAction& action,
                                            const HiddenProcess& process, std::int64_t n,
                                            std::uint64_t seed) {
  if (n < f.r) throw std::invalid_argument("path length below memory");
  CounterRng root(seed);
  CounterRng init = root.substream(kStreamInitial);
  CounterRng us = root.substream(kStreamUniform);
  CounterRng hs = root.substream(kStreamHidden);

  HiddenSimResult out;
  out.visible.seed = seed;
  out.visible.r = f.r;
  out.visible.symbols.reserve(n);
  out.hidden.reserve(n);

  std::int64_t context = draw_context(eta, init.next_uniform());
  const std::int64_t nr1 = pow_int(f.alphabet, f.r - 1);
  for (int i = f.r - 1; i >= 0; --i)
    out.visible.symbols.push_back(
        static_cast<int>((context / pow_int(f.alphabet, i)) % f.alphabet));

  int z = process.kind == HiddenProcess::Kind::Markov
              ? sample_discrete(process.initial, hs.next_uniform())
              : sample_discrete(process.weights, hs.next_uniform());
  for (std::int64_t t = f.r; t < n; ++t) {
    out.hidden.push_back(z);
    const double eps = action.apply(z, us.next_uniform());
    const int a = f.apply(context, eps);
    out.visible.symbols.push_back(a);
    context = (context % nr1) * f.alphabet + a;
    z = process.kind == HiddenProcess::Kind::Markov
            ? sample_discrete(process.transition[z], hs.next_uniform())
            : sample_discrete(process.weights, hs.next_uniform());
  }
  return out;
}

TransitionCounts transition_counts(const SamplePath& path, int alphabet, int r) {
  const std::int64_t n = static_cast<std::int64_t>(path.symbols.size());
  if (n < r + 1) throw std::invalid_argument("path too short");
  TransitionCounts tc{alphabet, r, std::vector<std::int64_t>(pow_int(alphabet, r + 1), 0)};
  std::int64_t context = 0;
  for (int t = 0; t < r; ++t) context = context * alphabet + path.symbols[t];
  const std::int64_t nr1 = pow_int(alphabet, r - 1);
  for (std::int64_t t = r; t < n; ++t) {
    const int a = path.symbols[t];
    ++tc.counts[context * alphabet + a];
    context = (context % nr1) * alphabet + a;
  }
  return tc;
}

std::vector<std::vector<double>> TransitionCounts::rows() const {
  const std::int64_t nc = pow_int(alphabet, r);
  std::vector<std::vector<double>> out(nc, std::vector<double>(alphabet, 0.0));
  for (std::int64_t c = 0; c < nc; ++c) {
    std::int64_t total = 0;
    for (int a = 0; a < alphabet; ++a) total += counts[c * alphabet + a];
    if (total == 0) continue;
    for (int a = 0; a < alphabet; ++a)
      out[c][a] = static_cast<double>(counts[c * alphabet + a]) / total;
  }
  return out;
}

ChiSquareReport chi_square_vs_kernel(const TransitionCounts& counts, const ConditionalKernel& p,
                                     std::int64_t min_count) {
  const std::int64_t nc = pow_int(counts.alphabet, counts.r);
  ChiSquareReport rep;
  for (std::int64_t c = 0; c < nc; ++c) {
    std::int64_t total = 0;
    for (int a = 0; a < counts.alphabet; ++a) total += counts.counts[c * counts.alphabet + a];
    if (total < min_count || !p.active(c)) continue;
    const std::vector<double>& row = p.row(c);
    int cells = 0;
    for (int a = 0; a < counts.alphabet; ++a) {
      if (row[a] <= 0.0) continue;
      const double expected = total * row[a];
      const double diff = counts.counts[c * counts.alphabet + a] - expected;
      rep.statistic += diff * diff / expected;
      ++cells;
    }
    rep.dof += cells - 1;
  }
  rep.p_value = rep.dof > 0 ? regularized_gamma_q(0.5 * rep.dof, 0.5 * rep.statistic) : 1.0;
  return rep;
}

double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) by series, return 1 - P.
    double term = 1.0 / a, sum = term, ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Q(a,x) by Lentz continued fraction.
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - lg);
}

}  // namespace fiberent
