#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace fiberent {

// Inverse-transform realization of a kernel: each active context partitions
// [0,1) into half-open symbol intervals in alphabet order.
struct RandomMapping {
  int alphabet = 2;
  int r = 1;
  // breakpoints[c] has alphabet+1 entries, 0 = first, 1 = last.
  std::vector<std::vector<double>> breakpoints;

  int apply(std::int64_t context, double u) const;
};

enum class InactivePolicy { Uniform };

RandomMapping build_random_mapping(const ConditionalKernel& p,
                                   InactivePolicy policy = InactivePolicy::Uniform);

// Interval lengths recover the kernel rows; inactive rows per policy.
ConditionalKernel kernel_of_mapping(const RandomMapping& f);

struct SamplePath {
  std::vector<int> symbols;
  std::uint64_t seed = 0;
  int r = 1;
  std::string kernel_id;
};

// Y_t = F(Y_{t-r}^{t-1}, U_t); initial context from eta, U_t from a
// dedicated substream so paths are pure functions of the seed.
SamplePath simulate(const RandomMapping& f, const ContextMarginal& eta, std::int64_t n,
                    std::uint64_t seed);

// Per-hidden-state circle rotations u -> (u + theta_z) mod 1; each rotation
// preserves Lebesgue measure exactly.
struct HiddenAction {
  std::vector<double> thetas;  // one per hidden state

  double apply(int z, double u) const;
};

struct HiddenProcess {
  enum class Kind { IID, Markov } kind = Kind::IID;
  std::vector<double> weights;        // IID: state distribution
  std::vector<std::vector<double>> transition;  // Markov rows
  std::vector<double> initial;        // Markov initial distribution
};

struct HiddenSimResult {
  SamplePath visible;
  std::vector<int> hidden;
};

// Y_t = F(Y_{t-r}^{t-1}, T_{Z_t}(U_t)) with the hidden stream drawn from an
// independent substream of the same seed.
HiddenSimResult simulate_with_hidden_action(const RandomMapping& f, const ContextMarginal& eta,
                                            const HiddenAction& action,
                                            const HiddenProcess& process, std::int64_t n,
                                            std::uint64_t seed);

// Empirical per-context transition rows from a path.
struct TransitionCounts {
  int alphabet = 2;
  int r = 1;
  std::vector<std::int64_t> counts;  // context-major, like block laws

  std::vector<std::vector<double>> rows() const;
};

TransitionCounts transition_counts(const SamplePath& path, int alphabet, int r);

// Pearson chi-square of observed counts against expected row probabilities;
// contexts with fewer than min_count observations are skipped.
struct ChiSquareReport {
  double statistic = 0.0;
  std::int64_t dof = 0;
  double p_value = 1.0;
};

ChiSquareReport chi_square_vs_kernel(const TransitionCounts& counts, const ConditionalKernel& p,
                                     std::int64_t min_count = 5);

// Upper regularized incomplete gamma Q(a, x); chi-square tail with k dof at
// statistic s is Q(k/2, s/2).
double regularized_gamma_q(double a, double x);

}  // namespace fiberent
