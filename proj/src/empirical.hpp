#pragma once

#include <cstdint>
#include <vector>

#include "constraints.hpp"
#include "realization.hpp"
#include "solver.hpp"
#include "types.hpp"

namespace fiberent {

// Overlapping-window frequency estimate. Not stationary-consistent in
// general; its residual is bounded by the two path endpoints.
struct EmpiricalEstimate {
  int alphabet = 2;
  int r = 1;
  std::vector<std::int64_t> counts;  // block-law indexing, sum = n - r
  std::int64_t n = 0;

  std::vector<double> probs() const;  // counts / (n - r)
};

EmpiricalEstimate empirical_block_law(const SamplePath& path, int alphabet, int r);

std::vector<double> empirical_targets(const EmpiricalEstimate& est, const FeatureSet& features);

// Maximize J over the stationary class with targets b_hat from the path,
// restricted to a tangent-coordinate ball around the reference law.
SolveResult empirical_maximizer(const SamplePath& path, const FeatureSet& features,
                                const SupportFace& face, const std::vector<double>& reference,
                                double neighborhood_radius, const SolverConfig& config);

struct ExperimentCell {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  double error = 0.0;  // sup norm against the population maximizer
  double value_nats = 0.0;
  SolveStatus status = SolveStatus::Infeasible;
};

struct ExperimentReport {
  std::vector<ExperimentCell> cells;  // n-major, seed order
  std::vector<std::int64_t> n_grid;
  std::vector<double> median_error;   // per n, converged cells only
  double loglog_slope = 0.0;          // least-squares fit of log median vs log n
};

struct ExperimentSpec {
  ConditionalKernel true_kernel;
  ContextMarginal eta;
  FeatureSet features;
  std::vector<double> u_star;  // population maximizer, also the ball center
  double neighborhood_radius = 0.2;
  std::vector<std::int64_t> n_grid;
  std::vector<std::uint64_t> seeds;
  SolverConfig solver;
};

// Simulate / estimate / locally maximize per (n, seed); cells run in
// parallel (capped by FIBERENT_THREADS) and are reported in grid order.
ExperimentReport consistency_experiment(const ExperimentSpec& spec);

// Diagnostic only: least-squares stationary projection of the estimate.
std::vector<double> stationary_projection(const EmpiricalEstimate& est);

}  // namespace fiberent
