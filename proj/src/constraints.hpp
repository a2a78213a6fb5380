#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "types.hpp"

namespace fiberent {

struct Feature {
  std::string name;
  std::vector<double> table;  // dense over A^{r+1}
};

struct FeatureSet {
  int alphabet = 2;
  int r = 1;
  std::vector<Feature> features;
  std::vector<double> targets;
};

enum class RowKind { Normalization, Moment, Stationarity };

/// Linear equality system over block-law coordinates, restricted to a face.
/// Always one normalization row, m moment rows and |A|^r stationarity rows
/// (redundancy is handled by rank computation, not row deletion).
struct ConstraintSystem {
  int alphabet = 2;
  int r = 1;
  Eigen::MatrixXd matrix;  // rows x |A|^{r+1}
  Eigen::VectorXd rhs;
  std::vector<RowKind> row_kinds;
  SupportFace face;

  std::int64_t dim() const { return matrix.cols(); }
  std::vector<std::int64_t> face_indices() const;
};

/// Basis of the homogeneous system's nullspace on the face: directions h with
/// sum 0, zero moment image, rowwise stationarity balance, support in face.
struct TangentBasis {
  // Columns are orthonormal directions in full A^{r+1} coordinates.
  Eigen::MatrixXd vectors;

  int dimension() const { return static_cast<int>(vectors.cols()); }
};

struct MarginalPinReport {
  bool span_fixed = false;       // paper-style span test on {1, G_1..G_m}
  bool augmented_fixed = false;  // full equality system pins the marginal
  std::optional<ContextMarginal> eta;
};

struct FeasiblePoint {
  enum class Status { Found, Infeasible } status = Status::Infeasible;
  std::optional<BlockLaw> law;
  double residual = 0.0;  // equality residual of the best candidate
};

ConstraintSystem build_constraint_system(const FeatureSet& features, const SupportFace& face);

TangentBasis tangent_space_basis(const ConstraintSystem& system);

MarginalPinReport context_marginal_fixed(const ConstraintSystem& system,
                                         const FeatureSet& features);

// Analytic-center-style phase 1: an interior point of the equality system
// whenever the relative interior is nonempty.
FeasiblePoint find_feasible_point(const ConstraintSystem& system);

struct Continuation {
  Eigen::MatrixXd right_inverse;  // full-coordinate columns, one per feature
  double operator_norm = 0.0;
};

// Minimal-norm linear right inverse of the moment map restricted to the
// tangent space. Throws "no right inverse" when rank deficient.
Continuation local_continuation_map(const ConstraintSystem& system, const FeatureSet& features);

// u(b_new) = u_star + R (b_new - b0). Throws "left face" if the result has a
// nonpositive coordinate on the face.
BlockLaw local_feasible_continuation(const BlockLaw& u_star, const ConstraintSystem& system,
                                     const FeatureSet& features,
                                     const std::vector<double>& b_new);

// Numerical rank with the sigma <= 1e-10 * sigma_max convention.
int numerical_rank(const Eigen::MatrixXd& m);

}  // namespace fiberent
