// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Statistical criteria use fixed seeds.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "aliased.hpp"
#include "closed_form.hpp"
#include "constraints.hpp"
#include "empirical.hpp"
#include "entropy.hpp"
#include "geometry.hpp"
#include "helpers.hpp"
#include "realization.hpp"
#include "rng.hpp"
#include "solver.hpp"

using namespace fiberent;
using fiberent::testing::binary_chain_2block;
using fiberent::testing::binary_q_law;
using fiberent::testing::context_indicator_features;
using fiberent::testing::mean_feature_set;
using fiberent::testing::random_simplex;
using fiberent::testing::sup_distance;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::vector<double> interior_simplex(CounterRng& rng, int k) {
  std::vector<double> p(k);
  double total = 0.0;
  for (double& v : p) {
    v = 0.2 + rng.next_uniform();
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

// Criterion 1: fixed context marginal, the maximizer is the product law.
void criterion_fixed_marginal() {
  CounterRng rng(101);
  double worst_u = 0.0, worst_v = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(3));
    const std::vector<double> pi = interior_simplex(rng, n);
    const FeatureSet fs = context_indicator_features(n, 1, pi);
    const ConstraintSystem sys = build_constraint_system(fs, SupportFace::full(n * n));
    const SolveResult res = maximize(sys, SolverConfig{}, fs);
    if (res.status != SolveStatus::Converged) {
      ok = false;
      continue;
    }
    const BlockLaw expected = iid_maximizer(pi);
    worst_u = std::max(worst_u, sup_distance(res.u_star->probs(), expected.probs()));
    worst_v = std::max(worst_v, std::abs(res.value_nats - shannon_entropy(pi)));
  }
  ok = ok && worst_u <= 1e-8 && worst_v <= 1e-10;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max law error %.2e <= 1e-8, max value error %.2e <= 1e-10",
                worst_u, worst_v);
  report(1, "fixed-marginal closed form", ok, buf);
}

// Criterion 2: fixed r-block marginal, the maximizer is the Markov extension.
void criterion_fixed_r_block() {
  CounterRng rng(102);
  double worst_u = 0.0, worst_cmi = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 1 + static_cast<int>(rng.next_below(2));
    std::vector<double> mu;
    if (r == 1) {
      mu = interior_simplex(rng, 2);
    } else {
      const double a = 0.1 + 0.8 * rng.next_uniform();
      const double b = 0.1 + 0.8 * rng.next_uniform();
      mu = binary_chain_2block(a, b);
    }
    const FeatureSet fs = context_indicator_features(2, r, mu);
    const std::int64_t dim = pow_int(2, r + 1);
    const ConstraintSystem sys = build_constraint_system(fs, SupportFace::full(dim));
    const SolveResult res = maximize(sys, SolverConfig{}, fs);
    if (res.status != SolveStatus::Converged) {
      ok = false;
      continue;
    }
    const BlockLaw expected = markov_extension(RBlockLaw{2, r, mu});
    worst_u = std::max(worst_u, sup_distance(res.u_star->probs(), expected.probs()));
    worst_cmi = std::max(worst_cmi, conditional_mutual_information(*res.u_star));
  }
  ok = ok && worst_u <= 1e-8 && worst_cmi <= 1e-10;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max law error %.2e <= 1e-8, max CMI %.2e <= 1e-10", worst_u,
                worst_cmi);
  report(2, "fixed r-block closed form", ok, buf);
}

// Criterion 3: the entropy deficit on a fixed-marginal class equals the
// conditional mutual information and vanishes only at the maximizer.
void criterion_gap_identity() {
  CounterRng rng(103);
  bool ok = true;
  double worst_id = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double m = 0.15 + 0.7 * rng.next_uniform();
    const double q_star = m * (1.0 - m);
    double q;
    if (trial % 10 == 0) {
      q = q_star;  // exercise the vanishing branch
    } else {
      double offset = (0.05 + 0.85 * rng.next_uniform()) * std::min(q_star, std::min(m, 1.0 - m) - q_star);
      if (offset < 1e-4) offset = 1e-4;
      q = (trial % 2 == 0) ? q_star - offset : q_star + offset;
    }
    const BlockLaw u = binary_q_law(m, q);
    const BlockLaw u_star = iid_maximizer({1.0 - m, m});
    const double gap = gap_fixed_r_block({1.0 - m, m}, u);
    const double cmi = conditional_mutual_information(u);
    worst_id = std::max(worst_id, std::abs(gap - cmi));
    if (gap < -1e-14) ok = false;
    const double dist = sup_distance(u.probs(), u_star.probs());
    if ((gap <= 1e-10) != (dist <= 1e-6)) ok = false;
  }
  ok = ok && worst_id <= 1e-10;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max |gap - CMI| %.2e <= 1e-10, vanishing iff at maximizer",
                worst_id);
  report(3, "gap identity", ok, buf);
}

// Criterion 4: the aliased worked example end to end.
void criterion_aliased() {
  bool ok = true;
  double worst_solver = 0.0, worst_diff = 0.0, worst_kernel = 0.0;
  const double expected_diff = std::log(2.0) - binary_entropy(0.25);
  for (double m : {0.1, 0.3, 0.5, 0.7}) {
    if (std::abs(canonical_q_star(m) - m * (1.0 - m)) > 1e-14) ok = false;
    const FeatureSet fs = mean_feature_set(m);
    const ConstraintSystem sys = build_constraint_system(fs, SupportFace::full(4));
    const SolveResult res = maximize(sys, SolverConfig{}, fs);
    if (res.status != SolveStatus::Converged) {
      ok = false;
      continue;
    }
    worst_solver = std::max(worst_solver, std::abs((*res.u_star)(0, 1) - m * (1.0 - m)));
    const FiberNonconstancyReport fiber = fiber_nonconstancy_demo(m);
    worst_diff = std::max(worst_diff, std::abs(fiber.difference - expected_diff));
    worst_kernel = std::max(worst_kernel, fiber.visible_kernel_gap);
  }
  ok = ok && worst_solver <= 1e-8 && worst_diff <= 1e-10 && worst_kernel <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "solver error %.2e <= 1e-8, entropy diff error %.2e <= 1e-10, kernel gap %.2e",
                worst_solver, worst_diff, worst_kernel);
  report(4, "aliased example end-to-end", ok, buf);
}

// Criterion 5: second-variation geometry.
void criterion_geometry() {
  CounterRng rng(105);
  bool ok = true;

  // Negative semidefiniteness on random pairs.
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2, r = 1;
    std::vector<double> u = interior_simplex(rng, 4);
    std::vector<double> h(4);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      h[i] = rng.next_uniform() - 0.5;
      s += h[i];
    }
    h[3] = -s;
    if (hessian_quadratic_form(BlockLaw(n, r, u, 1e-9), h) > 1e-12) ok = false;
  }

  // Null directions are exactly the row rescalings.
  ConstraintSystem loose;
  loose.alphabet = 2;
  loose.r = 1;
  loose.matrix = Eigen::MatrixXd::Ones(1, 4);
  loose.rhs = Eigen::VectorXd::Ones(1);
  loose.row_kinds = {RowKind::Normalization};
  loose.face = SupportFace::full(4);
  const TangentBasis loose_basis = tangent_space_basis(loose);
  for (int trial = 0; trial < 20; ++trial) {
    const BlockLaw u(2, 1, interior_simplex(rng, 4), 1e-9);
    const NullDirectionReport rep = null_directions(u, loose_basis);
    if (rep.null_vectors.empty() || !rep.all_row_rescaling ||
        rep.worst_proportionality_residual > 1e-8)
      ok = false;
  }

  // Gradient and quadratic form against finite differences.
  double worst_grad = 0.0, worst_hess = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> u = interior_simplex(rng, 4);
    const auto g = entropy_gradient_raw(u, 2, 1);
    for (int i = 0; i < 4; ++i) {
      const double eps = 1e-6;
      std::vector<double> up = u, dn = u;
      up[i] += eps;
      dn[i] -= eps;
      const double fd = (entropy_rate_raw(up, 2, 1) - entropy_rate_raw(dn, 2, 1)) / (2.0 * eps);
      worst_grad = std::max(worst_grad, std::abs(g[i] - fd) / std::max(1.0, std::abs(fd)));
    }
    std::vector<double> h(4);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      h[i] = rng.next_uniform() - 0.5;
      s += h[i];
    }
    h[3] = -s;
    const double eps = 1e-4;
    std::vector<double> up(4), dn(4);
    for (int i = 0; i < 4; ++i) {
      up[i] = u[i] + eps * h[i];
      dn[i] = u[i] - eps * h[i];
    }
    const double fd2 = (entropy_rate_raw(up, 2, 1) - 2.0 * entropy_rate_raw(u, 2, 1) +
                        entropy_rate_raw(dn, 2, 1)) /
                       (eps * eps);
    const double exact = hessian_quadratic_form(BlockLaw(2, 1, u, 1e-9), h);
    worst_hess = std::max(worst_hess, std::abs(exact - fd2) / std::max(1.0, std::abs(fd2)));
  }
  if (worst_grad > 1e-6 || worst_hess > 1e-5) ok = false;

  // Selector Jacobian versus a finite-difference re-solve of the mean.
  double worst_sel = 0.0;
  for (double m : {0.2, 0.35, 0.5, 0.65}) {
    const double ds = selector_jacobian(binary_fixed_mean_chart(m))(0, 0);
    if (std::abs(ds - (1.0 - 2.0 * m)) > 1e-8) ok = false;
    const double dm = 1e-3;
    double q[2];
    int side = 0;
    for (double mm : {m - dm, m + dm}) {
      const FeatureSet fs = mean_feature_set(mm);
      const ConstraintSystem sys = build_constraint_system(fs, SupportFace::full(4));
      const SolveResult res = maximize(sys, SolverConfig{}, fs);
      if (res.status != SolveStatus::Converged) ok = false;
      q[side++] = res.u_star ? (*res.u_star)(0, 1) : 0.0;
    }
    worst_sel = std::max(worst_sel, std::abs(ds - (q[1] - q[0]) / (2.0 * dm)));
  }
  if (worst_sel > 1e-4) ok = false;

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "grad fd %.2e <= 1e-6, hess fd %.2e <= 1e-5, selector fd %.2e <= 1e-4", worst_grad,
                worst_hess, worst_sel);
  report(5, "geometry suite", ok, buf);
}

// Criterion 6: quadratic expansion of the gap at the symmetric chart.
void criterion_gap_expansion() {
  const LocalChart chart = binary_fixed_mean_chart(0.5);
  Eigen::VectorXd v(1);
  v << 1.0;
  const auto rows = gap_quadratic_expansion_check(chart, v, {1e-2, 1e-3});
  const bool ok = std::abs(rows[0].ratio - 1.0) <= 0.05 && std::abs(rows[1].ratio - 1.0) <= 0.005;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "ratio(1e-2) = %.4f in [0.95,1.05], ratio(1e-3) = %.5f in [0.995,1.005]",
                rows[0].ratio, rows[1].ratio);
  report(6, "quadratic gap expansion", ok, buf);
}

// Criterion 7: long-run transition frequencies with and without hidden
// rotations.
void criterion_simulation_invariance() {
  const double m = 0.3;
  ConditionalKernel p{2, 1, {}};
  p.rows = {std::vector<double>{1.0 - m, m}, std::vector<double>{1.0 - m, m}};
  const RandomMapping f = build_random_mapping(p);
  const ContextMarginal eta{2, 1, {1.0 - m, m}};
  const std::int64_t n = 1000000;

  bool ok = true;
  double worst_row = 0.0, worst_p = 1.0;
  for (int with_hidden = 0; with_hidden < 2; ++with_hidden) {
    SamplePath path;
    if (with_hidden) {
      HiddenAction rot{{0.3, 0.7}};
      HiddenProcess proc;
      proc.weights = {0.5, 0.5};
      path = simulate_with_hidden_action(f, eta, rot, proc, n, 70001).visible;
    } else {
      path = simulate(f, eta, n, 70000);
    }
    const TransitionCounts counts = transition_counts(path, 2, 1);
    const auto rows = counts.rows();
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 2; ++a)
        worst_row = std::max(worst_row, std::abs(rows[c][a] - p.row(c)[a]));
    const ChiSquareReport chi = chi_square_vs_kernel(counts, p);
    worst_p = std::min(worst_p, chi.p_value);
  }
  ok = worst_row <= 0.005 && worst_p > 0.001;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max row error %.4f <= 0.005, min chi-square p %.4f > 0.001",
                worst_row, worst_p);
  report(7, "simulation and hidden-action invariance", ok, buf);
}

// Criterion 8: empirical consistency on the binary fixed-mean setup.
void criterion_consistency() {
  const double m = 0.3;
  ExperimentSpec spec;
  spec.true_kernel = ConditionalKernel{2, 1, {}};
  spec.true_kernel.rows = {std::vector<double>{1.0 - m, m}, std::vector<double>{1.0 - m, m}};
  spec.eta = ContextMarginal{2, 1, {1.0 - m, m}};
  spec.features = mean_feature_set(m);
  spec.u_star = iid_maximizer({1.0 - m, m}).probs();
  spec.neighborhood_radius = 0.2;
  spec.n_grid = {1000, 10000, 100000, 1000000};
  for (std::uint64_t s = 1; s <= 20; ++s) spec.seeds.push_back(s);
  const ExperimentReport rep = consistency_experiment(spec);

  bool ok = true;
  for (std::size_t i = 1; i < rep.median_error.size(); ++i)
    if (rep.median_error[i] > rep.median_error[i - 1]) ok = false;
  if (rep.median_error.back() > 0.01) ok = false;
  if (rep.loglog_slope < -0.7 || rep.loglog_slope > -0.3) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "medians %.2e %.2e %.2e %.2e non-increasing, last <= 0.01, slope %.3f in [-0.7,-0.3]",
                rep.median_error[0], rep.median_error[1], rep.median_error[2],
                rep.median_error[3], rep.loglog_slope);
  report(8, "empirical consistency", ok, buf);
}

// Criterion 9: solver versus the grid-search oracle on small instances.
void criterion_oracle() {
  CounterRng rng(109);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    FeatureSet fs;
    ConstraintSystem sys;
    if (trial % 2 == 0) {
      // r=1 fixed mean at a random interior value: tangent dimension 1.
      const double mm = 0.2 + 0.6 * rng.next_uniform();
      fs = mean_feature_set(mm);
      sys = build_constraint_system(fs, SupportFace::full(4));
    } else {
      // r=2 fixed 2-block marginal: tangent dimension 1.
      const double a = 0.15 + 0.7 * rng.next_uniform();
      const double b = 0.15 + 0.7 * rng.next_uniform();
      fs = context_indicator_features(2, 2, binary_chain_2block(a, b));
      sys = build_constraint_system(fs, SupportFace::full(8));
    }
    const SolveResult res = maximize(sys, SolverConfig{}, fs);
    if (res.status != SolveStatus::Converged) {
      ok = false;
      continue;
    }
    const BlockLaw oracle = brute_force_maximizer(sys, 1e-3);
    const double diff = std::abs(res.value_nats - entropy_rate(oracle).value_nats);
    worst = std::max(worst, diff);
  }
  ok = ok && worst <= 1e-3;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max |J(solver) - J(oracle)| %.2e <= 1e-3", worst);
  report(9, "oracle equivalence", ok, buf);
}

}  // namespace

int main() {
  criterion_fixed_marginal();
  criterion_fixed_r_block();
  criterion_gap_identity();
  criterion_aliased();
  criterion_geometry();
  criterion_gap_expansion();
  criterion_simulation_invariance();
  criterion_consistency();
  criterion_oracle();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
