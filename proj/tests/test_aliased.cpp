#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aliased.hpp"
#include "entropy.hpp"
#include "helpers.hpp"

using namespace fiberent;

TEST_CASE("hidden kernel rows") {
  // Symmetric half splits collapse to the uniform matrix.
  AliasedSpec sym;
  sym.m = 0.5;
  sym.a = 0.5;
  sym.b = 0.5;
  sym.lambda = 0.5;
  sym.mu_param = 0.5;
  const HiddenMatrix k = build_hidden_kernel(sym);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(k[i][j] == doctest::Approx(0.25).epsilon(1e-14));

  // Rows always sum to one.
  CounterRng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    AliasedSpec spec;
    spec.m = 0.1 + 0.8 * rng.next_uniform();
    spec.a = 0.1 + 0.8 * rng.next_uniform();
    spec.b = 0.1 + 0.8 * rng.next_uniform();
    spec.lambda = 0.1 + 0.8 * rng.next_uniform();
    spec.mu_param = 0.1 + 0.8 * rng.next_uniform();
    const HiddenMatrix kk = build_hidden_kernel(spec);
    for (int i = 0; i < 4; ++i) {
      double row = 0.0;
      for (int j = 0; j < 4; ++j) {
        row += kk[i][j];
        CHECK(kk[i][j] >= 0.0);
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  // lambda near 1 concentrates visible-0 mass on the first copy.
  AliasedSpec conc = sym;
  conc.lambda = 1.0 - 1e-6;
  const HiddenMatrix kc = build_hidden_kernel(conc);
  CHECK(kc[0][0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(kc[0][1] <= 1e-6);

  AliasedSpec bad = sym;
  bad.a = 0.0;
  CHECK_THROWS_WITH_AS(build_hidden_kernel(bad), "open-interval parameters required",
                       std::invalid_argument);
}

TEST_CASE("hidden stationary law") {
  const auto sym = hidden_stationary(0.5, 0.5, 0.5);
  for (double v : sym) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));

  const auto pi = hidden_stationary(0.3, 0.2, 0.6);
  CHECK(pi[0] == doctest::Approx(0.14).epsilon(1e-14));
  CHECK(pi[1] == doctest::Approx(0.56).epsilon(1e-14));
  CHECK(pi[2] == doctest::Approx(0.18).epsilon(1e-14));
  CHECK(pi[3] == doctest::Approx(0.12).epsilon(1e-14));

  // pi K = pi at the selected point a = m, b = 1-m for random parameters.
  CounterRng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    AliasedSpec spec;
    spec.m = 0.1 + 0.8 * rng.next_uniform();
    spec.a = spec.m;
    spec.b = 1.0 - spec.m;
    spec.lambda = 0.1 + 0.8 * rng.next_uniform();
    spec.mu_param = 0.1 + 0.8 * rng.next_uniform();
    const HiddenMatrix k = build_hidden_kernel(spec);
    const auto p = hidden_stationary(spec.m, spec.lambda, spec.mu_param);
    for (int j = 0; j < 4; ++j) {
      double out = 0.0;
      for (int i = 0; i < 4; ++i) out += p[i] * k[i][j];
      CHECK(std::abs(out - p[j]) <= 1e-12);
    }
  }
}

TEST_CASE("lumpability") {
  AliasedSpec spec;
  spec.m = 0.3;
  spec.a = 0.3;
  spec.b = 0.7;
  spec.lambda = 0.2;
  spec.mu_param = 0.6;
  const HiddenMatrix k = build_hidden_kernel(spec);
  const LumpabilityReport rep = visible_kernel_of_hidden(k);
  CHECK(rep.lumpable);
  CHECK(rep.max_discrepancy <= 1e-12);
  // a = m, b = 1-m: both visible rows equal (1-m, m).
  for (int y = 0; y < 2; ++y) {
    CHECK(rep.visible[y][0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(rep.visible[y][1] == doctest::Approx(0.3).epsilon(1e-12));
  }

  // Breaking one fiber sum destroys lumpability.
  HiddenMatrix broken = k;
  broken[0][0] += 0.05;
  broken[0][2] -= 0.05;
  CHECK_THROWS_AS(visible_kernel_of_hidden(broken), std::domain_error);
}

TEST_CASE("fixed mean family") {
  const auto half = fixed_mean_family(0.5, 0.25);
  CHECK(half.first == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.second == doctest::Approx(0.5).epsilon(1e-14));

  const auto skew = fixed_mean_family(0.3, 0.1);
  CHECK(skew.first == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
  CHECK(skew.second == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // Flow balance (1-m) a = m b holds across the family.
  CounterRng rng(57);
  for (int trial = 0; trial < 50; ++trial) {
    const double m = 0.1 + 0.8 * rng.next_uniform();
    const double q = (0.05 + 0.9 * rng.next_uniform()) * std::min(m, 1.0 - m);
    const auto [a, b] = fixed_mean_family(m, q);
    CHECK((1.0 - m) * a == doctest::Approx(m * b).epsilon(1e-12));
  }

  CHECK_THROWS_AS(fixed_mean_family(0.3, 0.0), std::invalid_argument);
}

TEST_CASE("visible entropy along the family") {
  CHECK(visible_entropy_h(0.5, 0.25) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(visible_entropy_h(0.5, 0.05) == doctest::Approx(binary_entropy(0.1)).epsilon(1e-12));
  CHECK(binary_entropy(0.1) == doctest::Approx(0.325083).epsilon(1e-6));

  // Concavity in q and a sign change of h' around the maximizer.
  const double m = 0.35;
  const double qlo = 0.05, qhi = 0.95 * std::min(m, 1.0 - m);
  double prev = -1e18;
  bool increasing = true;
  for (int i = 1; i <= 40; ++i) {
    const double q1 = qlo + (qhi - qlo) * (i - 1) / 40.0;
    const double q2 = qlo + (qhi - qlo) * i / 40.0;
    const double mid = visible_entropy_h(m, 0.5 * (q1 + q2));
    const double avg = 0.5 * (visible_entropy_h(m, q1) + visible_entropy_h(m, q2));
    CHECK(mid >= avg - 1e-12);
    (void)prev;
    (void)increasing;
  }
  CHECK(visible_entropy_h_prime(m, 0.5 * canonical_q_star(m)) > 0.0);
  CHECK(visible_entropy_h_prime(m, 0.5 * (canonical_q_star(m) + std::min(m, 1.0 - m))) < 0.0);
}

TEST_CASE("canonical transition mass") {
  CHECK(canonical_q_star(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(canonical_q_star(0.3) == doctest::Approx(0.21).epsilon(1e-12));
  const auto [a_star, b_star] = fixed_mean_family(0.3, canonical_q_star(0.3));
  CHECK(a_star == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(b_star == doctest::Approx(0.7).epsilon(1e-12));
  // The root of h' sits at q*.
  CHECK(std::abs(visible_entropy_h_prime(0.3, 0.21)) <= 1e-12);
}

TEST_CASE("hidden entropy at the selected point") {
  CHECK(hidden_entropy(0.5, 0.5, 0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(hidden_entropy(0.5, 0.25, 0.25) ==
        doctest::Approx(std::log(2.0) + binary_entropy(0.25)).epsilon(1e-12));
  CHECK(std::log(2.0) + binary_entropy(0.25) == doctest::Approx(1.255482).epsilon(1e-6));

  // Formula h2(m) + (1-m) h2(lambda) + m h2(mu); cross-check against the
  // Shannon entropy of the common kernel row.
  CounterRng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    AliasedSpec spec;
    spec.m = 0.1 + 0.8 * rng.next_uniform();
    spec.a = spec.m;
    spec.b = 1.0 - spec.m;
    spec.lambda = 0.1 + 0.8 * rng.next_uniform();
    spec.mu_param = 0.1 + 0.8 * rng.next_uniform();
    const HiddenMatrix k = build_hidden_kernel(spec);
    const std::vector<double> row(k[0].begin(), k[0].end());
    CHECK(hidden_entropy(spec.m, spec.lambda, spec.mu_param) ==
          doctest::Approx(shannon_entropy(row)).epsilon(1e-12));
    // All four rows coincide at the selected point.
    for (int i = 1; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(k[i][j] == doctest::Approx(k[0][j]).epsilon(1e-14));
  }

  // Half splits maximize the hidden entropy over a grid.
  const double best = hidden_entropy(0.4, 0.5, 0.5);
  for (int i = 1; i < 10; ++i)
    for (int j = 1; j < 10; ++j)
      CHECK(hidden_entropy(0.4, i / 10.0, j / 10.0) <= best + 1e-12);
}

TEST_CASE("fiber nonconstancy") {
  for (double m : {0.3, 0.5, 0.7}) {
    const FiberNonconstancyReport rep = fiber_nonconstancy_demo(m);
    CHECK(rep.visible_kernel_gap <= 1e-12);
    CHECK(rep.difference == doctest::Approx(std::log(2.0) - binary_entropy(0.25)).epsilon(1e-10));
    CHECK(rep.difference == doctest::Approx(0.130812).epsilon(1e-5));
    CHECK(rep.entropy_half > rep.entropy_quarter);
  }
}

TEST_CASE("persistence parametrization") {
  const auto [a0, b0] = rho_parametrization(0.3, 0.0);
  CHECK(a0 == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(b0 == doctest::Approx(0.7).epsilon(1e-14));

  const auto [a1, b1] = rho_parametrization(0.3, 1.0);
  CHECK(a1 == 0.0);
  CHECK(b1 == 0.0);

  const auto [a8, b8] = rho_parametrization(0.5, 0.8);
  CHECK(a8 == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(b8 == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("entropy gap equals conditional mutual information") {
  CounterRng rng(63);
  for (int trial = 0; trial < 50; ++trial) {
    const double m = 0.15 + 0.7 * rng.next_uniform();
    const double q = (0.05 + 0.9 * rng.next_uniform()) * std::min(m, 1.0 - m);
    const auto [a, b] = fixed_mean_family(m, q);
    const BlockLaw u = binary_chain_block_law(m, a, b);
    const double gap = visible_entropy_h(m, canonical_q_star(m)) - visible_entropy_h(m, q);
    CHECK(gap == doctest::Approx(conditional_mutual_information(u)).epsilon(1e-10));
    CHECK(gap >= -1e-12);
  }

  // q* dominates a grid of fiber points.
  for (double m : {0.2, 0.5, 0.8}) {
    const double best = visible_entropy_h(m, canonical_q_star(m));
    const double qmax = std::min(m, 1.0 - m);
    for (int i = 1; i < 20; ++i) CHECK(visible_entropy_h(m, qmax * i / 20.0) <= best + 1e-12);
  }
}

TEST_CASE("hidden entropy numeric diagnostic") {
  AliasedSpec spec;
  spec.m = 0.3;
  spec.a = 0.3;
  spec.b = 0.7;
  spec.lambda = 0.2;
  spec.mu_param = 0.6;
  const HiddenMatrix k = build_hidden_kernel(spec);
  const auto pi = hidden_stationary(spec.m, spec.lambda, spec.mu_param);
  CHECK(hidden_entropy_numeric(k, pi) ==
        doctest::Approx(hidden_entropy(spec.m, spec.lambda, spec.mu_param)).epsilon(1e-12));
}

TEST_CASE("binary chain block law") {
  const BlockLaw u = binary_chain_block_law(0.5, 0.1, 0.1);
  CHECK(u.at(0) == doctest::Approx(0.45).epsilon(1e-14));
  CHECK(u.at(1) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK_THROWS_AS(binary_chain_block_law(0.3, 0.5, 0.5), std::invalid_argument);
}
