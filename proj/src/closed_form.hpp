#pragma once

#include <vector>

#include "types.hpp"

namespace fiberent {

/// Stationary r-block law mu on A^r: the fixed marginal of the Markov
/// extension regime. Shift invariance means left and right (r-1)-block
/// marginals agree.
struct RBlockLaw {
  int alphabet = 2;
  int r = 1;
  std::vector<double> probs;

  double shift_invariance_residual() const;
  void validate(double tol = kProbTol) const;
};

enum class NullContextRow { Uniform };  // canonical choice for mu(s) = 0 rows

// i.i.d. maximizer for a fixed one-point marginal: u*(a,b) = pi_a pi_b, r = 1.
BlockLaw iid_maximizer(const std::vector<double>& pi);

// (r-1)-step Markov extension u*(c,a) = mu(c) q(a | c_2..c_r) with
// q(a|s) = mu(s,a)/mu(s). Throws "mu not stationary" beyond tol unless
// reproject is set, in which case mu is first projected onto the
// shift-invariant subspace.
BlockLaw markov_extension(const RBlockLaw& mu, NullContextRow policy = NullContextRow::Uniform,
                          double tol = 1e-10, bool reproject = false);

struct BinaryFixedMean {
  BlockLaw law;
  double transition[2][2];  // both rows (1-m, m)
};

BinaryFixedMean binary_fixed_mean_maximizer(double m);

// Least-squares projection of mu onto {shift-invariant, sum 1}; diagnostic
// utility for empirical inputs.
RBlockLaw project_shift_invariant(const RBlockLaw& mu);

}  // namespace fiberent
