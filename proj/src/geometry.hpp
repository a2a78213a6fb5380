#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "constraints.hpp"
#include "solver.hpp"
#include "types.hpp"

namespace fiberent {

// Local geometry of the maximizer on a fixed-support face.

// Second variation of J at u along h; <= 0 for every direction, and 0
// exactly on row-rescaling directions. Throws when h touches a zero-mass
// coordinate of u.
double hessian_quadratic_form(const BlockLaw& u, const std::vector<double>& h);

struct NullDirectionReport {
  Eigen::VectorXd eigenvalues;               // of the Hessian on the basis
  std::vector<Eigen::VectorXd> null_vectors; // full-coordinate directions
  bool all_row_rescaling = true;             // each null vector h = alpha(c) u(c,.)
  double worst_proportionality_residual = 0.0;
};

NullDirectionReport null_directions(const BlockLaw& u, const TangentBasis& basis);

// Unit direction in span(basis) that rescales the rows of u, if one exists;
// optionally returns the per-context factors.
std::optional<Eigen::VectorXd> tangent_row_rescaling(const BlockLaw& u, const TangentBasis& basis,
                                                     std::vector<double>* alpha = nullptr);

struct ConcavityWitness {
  BlockLaw u;
  std::vector<double> direction;
  std::vector<double> alpha;  // per-context rescaling factors
};

struct StrictConcavityReport {
  bool strictly_concave = true;
  std::optional<ConcavityWitness> witness;
};

// True iff no sampled point admits a tangent row-rescaling direction.
StrictConcavityReport strict_concavity_on_face(const std::vector<BlockLaw>& samples,
                                               const TangentBasis& basis);

/// Linear chart u(b, xi) = u0 + B (b - b0) + X (xi - xi0): columns of B are
/// tangent directions with moment image e_j, columns of X span the moment
/// map's kernel within the tangent space.
struct LocalChart {
  BlockLaw base;
  Eigen::MatrixXd b_directions;   // dim x m
  Eigen::MatrixXd xi_directions;  // dim x k
  SupportFace face;
};

// Canonical chart: b-directions are pseudoinverse preimages of the moment
// standard basis, xi-directions an orthonormal kernel basis.
LocalChart build_local_chart(const BlockLaw& base, const ConstraintSystem& system,
                             const FeatureSet& features);

// Chart (b, xi) = (m, q) for the binary r=1 fixed-mean family
// u = (1-m-q, q, q, m-q): db direction (-1,0,0,1), dq direction (-1,1,1,-1).
LocalChart binary_fixed_mean_chart(double m);

struct FiberHessian {
  Eigen::MatrixXd xi_xi;  // d2J/dxi dxi
  Eigen::MatrixXd xi_b;   // d2J/dxi db
  Eigen::MatrixXd b_b;    // d2J/db db
  Eigen::VectorXd grad_xi;
  Eigen::VectorXd grad_b;
};

FiberHessian fiber_hessian(const LocalChart& chart);

// Ds(b0) = -[d2J/dxidxi]^-1 d2J/dxidb. Requires a critical, negative
// definite fiber block; throws "selector not differentiable here" otherwise.
Eigen::MatrixXd selector_jacobian(const LocalChart& chart);

struct EnvelopeReport {
  Eigen::VectorXd dv;             // DV(b0) via the envelope identity
  Eigen::VectorXd dv_fd;          // finite-difference re-solve
  Eigen::MatrixXd d2v;            // Schur complement formula
  Eigen::MatrixXd d2v_fd;         // second differences of the value function
  double first_order_error = 0.0;
  double second_order_error = 0.0;
};

EnvelopeReport envelope_check(const LocalChart& chart, double delta = 1e-4);

struct GapExpansionRow {
  double delta = 0.0;
  double gap = 0.0;
  double predicted = 0.0;  // 0.5 delta^2 v^T K v
  double ratio = 0.0;
};

// Gap along a unit fiber direction versus its quadratic model.
std::vector<GapExpansionRow> gap_quadratic_expansion_check(const LocalChart& chart,
                                                           const Eigen::VectorXd& fiber_direction,
                                                           const std::vector<double>& deltas);

// Re-maximize over the fiber starting from a feasible point; Newton ascent
// in the xi coordinates. Used by the envelope finite-difference checks.
double maximize_over_fiber(const LocalChart& chart, const Eigen::VectorXd& u_start_shift);

}  // namespace fiberent
