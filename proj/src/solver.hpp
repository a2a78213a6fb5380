#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "constraints.hpp"
#include "entropy.hpp"
#include "types.hpp"

namespace fiberent {

struct SolverConfig {
  int max_iters = 500;
  double grad_tol = 1e-10;        // projected gradient norm
  double barrier_floor = 1e-14;   // coordinates never go below this
  std::uint64_t seed = 0;         // randomized diagnostics only
  // Optional trust ball in tangent coordinates around a reference law.
  std::optional<std::vector<double>> reference;  // full-coordinate law
  double neighborhood_radius = 0.0;              // 0 disables the ball
};

enum class SolveStatus { Converged, MaxIters, Infeasible };

struct KKTCertificate {
  std::vector<double> lambda;  // one per feature
  double gamma = 0.0;
  std::vector<double> psi;  // per context, psi(0) = 0 gauge
  double stationarity_residual = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<BlockLaw> u_star;
  double value_nats = 0.0;
  int iterations = 0;
  double infeasibility_residual = 0.0;
  bool face_shrink = false;  // converged with a coordinate pinned at the floor
  std::optional<KKTCertificate> certificate;
};

// Entropy-rate maximization over the system's feasible class: phase-1
// interior point, then ascent in tangent coordinates (damped Newton with a
// projected-gradient fallback and backtracking line search).
SolveResult maximize(const ConstraintSystem& system, const SolverConfig& config,
                     const FeatureSet& features);

// Least-squares fit of (gamma, lambda, psi) to the first-order identity on
// the active support; residual is the max absolute equation defect.
KKTCertificate kkt_multipliers(const BlockLaw& u_star, const ConstraintSystem& system,
                               const FeatureSet& features);

struct KernelRepresentation {
  ConditionalKernel kernel;
  bool simplified_rowwise = false;  // psi(sigma(c,a)) constant per row
};

// Softmax form of the kernel from the certificate multipliers.
KernelRepresentation kernel_representation(const KKTCertificate& cert, const FeatureSet& features,
                                           const ConstraintSystem& system);

struct UniquenessReport {
  bool strictly_concave_on_samples = true;
  int pairs_tested = 0;
  // Witness pair when a flat (rowwise-proportional) direction is found.
  std::optional<std::pair<BlockLaw, BlockLaw>> flat_pair;
};

UniquenessReport uniqueness_diagnostic(const ConstraintSystem& system, int samples,
                                       std::uint64_t seed);

// Grid-search oracle over tangent coordinates with one local refinement
// pass. Requires tangent dimension <= 3 and |A|^{r+1} <= 16.
BlockLaw brute_force_maximizer(const ConstraintSystem& system, double resolution);

}  // namespace fiberent
