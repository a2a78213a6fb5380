#include "constraints.hpp"

#include <cmath>
#include <stdexcept>

namespace fiberent {

namespace {
constexpr double kRankTol = 1e-10;

Eigen::MatrixXd face_columns(const ConstraintSystem& sys) {
  const auto idx = sys.face_indices();
  Eigen::MatrixXd a(sys.matrix.rows(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) a.col(j) = sys.matrix.col(idx[j]);
  return a;
}
}  // namespace

std::vector<std::int64_t> ConstraintSystem::face_indices() const {
  std::vector<std::int64_t> idx;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(face.mask.size()); ++i)
    if (face.mask[i]) idx.push_back(i);
  return idx;
}

int numerical_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > kRankTol * s(0)) ++rank;
  return rank;
}

ConstraintSystem build_constraint_system(const FeatureSet& fs, const SupportFace& face) {
  const int n = fs.alphabet;
  const int r = fs.r;
  const std::int64_t dim = pow_int(n, r + 1);
  const std::int64_t nc = pow_int(n, r);
  if (static_cast<std::int64_t>(face.mask.size()) != dim)
    throw std::invalid_argument("face mask has wrong length");
  if (face.count() == 0) throw std::invalid_argument("face must allow a coordinate");
  const int m = static_cast<int>(fs.features.size());
  if (static_cast<int>(fs.targets.size()) != m)
    throw std::invalid_argument("targets do not match features");

  ConstraintSystem sys;
  sys.alphabet = n;
  sys.r = r;
  sys.face = face;
  const std::int64_t rows = 1 + m + nc;
  sys.matrix = Eigen::MatrixXd::Zero(rows, dim);
  sys.rhs = Eigen::VectorXd::Zero(rows);
  sys.row_kinds.reserve(rows);

  sys.matrix.row(0).setOnes();
  sys.rhs(0) = 1.0;
  sys.row_kinds.push_back(RowKind::Normalization);

  for (int j = 0; j < m; ++j) {
    if (static_cast<std::int64_t>(fs.features[j].table.size()) != dim)
      throw std::invalid_argument("feature table has wrong length");
    for (std::int64_t i = 0; i < dim; ++i) sys.matrix(1 + j, i) = fs.features[j].table[i];
    sys.rhs(1 + j) = fs.targets[j];
    sys.row_kinds.push_back(RowKind::Moment);
  }

  // Right marginal minus left marginal per context.
  for (std::int64_t c = 0; c < nc; ++c) {
    const std::int64_t row = 1 + m + c;
    for (int a = 0; a < n; ++a) {
      sys.matrix(row, c * n + a) += 1.0;
      sys.matrix(row, prepend_block(a, c, n, r)) -= 1.0;
    }
    sys.row_kinds.push_back(RowKind::Stationarity);
  }
  return sys;
}

TangentBasis tangent_space_basis(const ConstraintSystem& sys) {
  const auto idx = sys.face_indices();
  const Eigen::MatrixXd a = face_columns(sys);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) > kRankTol * smax) ++rank;
  const int null_dim = static_cast<int>(idx.size()) - rank;

  TangentBasis basis;
  basis.vectors = Eigen::MatrixXd::Zero(sys.dim(), null_dim);
  for (int k = 0; k < null_dim; ++k) {
    const Eigen::VectorXd v = svd.matrixV().col(rank + k);
    for (std::size_t j = 0; j < idx.size(); ++j) basis.vectors(idx[j], k) = v(j);
  }
  return basis;
}

MarginalPinReport context_marginal_fixed(const ConstraintSystem& sys, const FeatureSet& fs) {
  MarginalPinReport rep;
  const int n = sys.alphabet;
  const std::int64_t dim = sys.dim();
  const std::int64_t nc = pow_int(n, sys.r);
  const int m = static_cast<int>(fs.features.size());

  // Span test: each context indicator against span{1, G_1..G_m}.
  Eigen::MatrixXd span(dim, 1 + m);
  span.col(0).setOnes();
  for (int j = 0; j < m; ++j)
    for (std::int64_t i = 0; i < dim; ++i) span(i, 1 + j) = fs.features[j].table[i];
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(span);

  std::vector<double> eta_span(nc, 0.0);
  bool span_ok = true;
  for (std::int64_t c = 0; c < nc && span_ok; ++c) {
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(dim);
    for (int a = 0; a < n; ++a) ind(c * n + a) = 1.0;
    const Eigen::VectorXd coef = cod.solve(ind);
    if ((span * coef - ind).norm() > 1e-10 * std::sqrt(static_cast<double>(n))) {
      span_ok = false;
      break;
    }
    double v = coef(0);
    for (int j = 0; j < m; ++j) v += coef(1 + j) * fs.targets[j];
    eta_span[c] = v;
  }
  rep.span_fixed = span_ok;

  // Augmented test: the full equality system pins the marginal iff every
  // tangent direction has zero row sums.
  const TangentBasis basis = tangent_space_basis(sys);
  bool aug_ok = true;
  for (int k = 0; k < basis.dimension() && aug_ok; ++k) {
    for (std::int64_t c = 0; c < nc; ++c) {
      double rowsum = 0.0;
      for (int a = 0; a < n; ++a) rowsum += basis.vectors(c * n + a, k);
      if (std::abs(rowsum) > 1e-10) {
        aug_ok = false;
        break;
      }
    }
  }
  rep.augmented_fixed = aug_ok;

  if (rep.span_fixed) {
    rep.eta = ContextMarginal{n, sys.r, eta_span};
  } else if (rep.augmented_fixed) {
    const FeasiblePoint fp = find_feasible_point(sys);
    if (fp.status == FeasiblePoint::Status::Found) rep.eta = context_marginal(*fp.law);
  }
  return rep;
}

FeasiblePoint find_feasible_point(const ConstraintSystem& sys) {
  FeasiblePoint out;
  const auto idx = sys.face_indices();
  const Eigen::MatrixXd a = face_columns(sys);
  const Eigen::VectorXd& rhs = sys.rhs;

  // Consistency of the equalities regardless of nonnegativity.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd u_ls = cod.solve(rhs);
  const double ls_residual = (a * u_ls - rhs).lpNorm<Eigen::Infinity>();
  if (ls_residual > 1e-8) {
    out.residual = ls_residual;
    return out;
  }

  const int rank = numerical_rank(a);
  const int null_dim = static_cast<int>(idx.size()) - rank;
  std::vector<double> full(sys.dim(), 0.0);

  if (null_dim == 0) {
    // Singleton affine slice; accept when nonnegative.
    for (int j = 0; j < u_ls.size(); ++j) {
      if (u_ls(j) < -1e-9) {
        out.residual = -u_ls(j);
        return out;
      }
      full[idx[j]] = std::max(u_ls(j), 0.0);
    }
    out.status = FeasiblePoint::Status::Found;
    out.law = BlockLaw(sys.alphabet, sys.r, std::move(full), 1e-8);
    out.residual = ls_residual;
    return out;
  }

  // Interior point via the dual of max sum(u - u log u) s.t. A u = rhs:
  // u = exp(-A^T y), minimize phi(y) = sum(u) + rhs.y by damped Newton.
  // Redundant rows make the Newton Hessian singular, so iterate on the
  // full-row-rank reduction Sigma_r V_r^T u = (U^T rhs)_r from the SVD.
  const std::int64_t f = idx.size();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd ar = svd.singularValues().head(rank).asDiagonal() *
                             svd.matrixV().leftCols(rank).transpose();
  const Eigen::VectorXd rr = (svd.matrixU().transpose() * rhs).head(rank);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rank);
  Eigen::VectorXd u(f);
  const auto eval_u = [&](const Eigen::VectorXd& yy) {
    Eigen::VectorXd e = -(ar.transpose() * yy);
    return (e.array().min(60.0).max(-700.0)).exp().matrix().eval();
  };
  u = eval_u(y);
  double residual = (a * u - rhs).lpNorm<Eigen::Infinity>();
  for (int iter = 0; iter < 500 && residual > 1e-14; ++iter) {
    const Eigen::VectorXd grad = rr - ar * u;
    Eigen::MatrixXd h = ar * u.asDiagonal() * ar.transpose();
    h.diagonal().array() += 1e-15 * (1.0 + h.trace());
    const Eigen::VectorXd step = -h.ldlt().solve(grad);
    double phi0 = u.sum() + rr.dot(y);
    double alpha = 1.0;
    Eigen::VectorXd y_new;
    for (int ls = 0; ls < 60; ++ls) {
      y_new = y + alpha * step;
      const Eigen::VectorXd u_new = eval_u(y_new);
      // Accept roundoff-level changes so the last Newton steps go through.
      if (u_new.sum() + rr.dot(y_new) <= phi0 + 1e-14 * (1.0 + std::abs(phi0))) break;
      alpha *= 0.5;
    }
    y = y_new;
    u = eval_u(y);
    residual = (a * u - rhs).lpNorm<Eigen::Infinity>();
  }
  out.residual = residual;
  if (residual > 1e-9) return out;

  double total = 0.0;
  for (int j = 0; j < u.size(); ++j) total += u(j);
  for (int j = 0; j < u.size(); ++j) full[idx[j]] = u(j) / total;
  out.status = FeasiblePoint::Status::Found;
  out.law = BlockLaw(sys.alphabet, sys.r, std::move(full));
  return out;
}

Continuation local_continuation_map(const ConstraintSystem& sys, const FeatureSet& fs) {
  // Directions that keep normalization and stationarity but move the
  // moments: drop the moment rows before taking the nullspace.
  ConstraintSystem reduced;
  reduced.alphabet = sys.alphabet;
  reduced.r = sys.r;
  reduced.face = sys.face;
  std::vector<std::int64_t> keep;
  for (std::size_t i = 0; i < sys.row_kinds.size(); ++i)
    if (sys.row_kinds[i] != RowKind::Moment) keep.push_back(static_cast<std::int64_t>(i));
  reduced.matrix.resize(keep.size(), sys.dim());
  reduced.rhs.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    reduced.matrix.row(i) = sys.matrix.row(keep[i]);
    reduced.rhs(i) = sys.rhs(keep[i]);
    reduced.row_kinds.push_back(sys.row_kinds[keep[i]]);
  }
  const TangentBasis basis = tangent_space_basis(reduced);
  const int m = static_cast<int>(fs.features.size());
  const int d = basis.dimension();
  Eigen::MatrixXd moment(m, d);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < d; ++k) {
      double v = 0.0;
      for (std::int64_t i = 0; i < sys.dim(); ++i)
        v += fs.features[j].table[i] * basis.vectors(i, k);
      moment(j, k) = v;
    }
  if (numerical_rank(moment) < m) throw std::domain_error("no right inverse");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(moment, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::VectorXd inv = s;
  for (int i = 0; i < s.size(); ++i) inv(i) = s(i) > kRankTol * s(0) ? 1.0 / s(i) : 0.0;
  const Eigen::MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  Continuation cont;
  cont.right_inverse = basis.vectors * pinv;
  cont.operator_norm = inv.maxCoeff();
  return cont;
}

BlockLaw local_feasible_continuation(const BlockLaw& u_star, const ConstraintSystem& sys,
                                     const FeatureSet& fs, const std::vector<double>& b_new) {
  const Continuation cont = local_continuation_map(sys, fs);
  const int m = static_cast<int>(fs.features.size());
  if (static_cast<int>(b_new.size()) != m) throw std::invalid_argument("target size mismatch");
  Eigen::VectorXd db(m);
  for (int j = 0; j < m; ++j) db(j) = b_new[j] - fs.targets[j];
  std::vector<double> u = u_star.probs();
  const Eigen::VectorXd shift = cont.right_inverse * db;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(u.size()); ++i) u[i] += shift(i);
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(u.size()); ++i)
    if (sys.face.mask[i] && u[i] <= 0.0) throw std::domain_error("left face");
  return BlockLaw(u_star.alphabet_size(), u_star.memory(), std::move(u));
}

}  // namespace fiberent
