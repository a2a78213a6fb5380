#include "geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "closed_form.hpp"
#include "entropy.hpp"

namespace fiberent {

namespace {

// Gradient of J over positive coordinates, zero elsewhere. Directions used
// with it must be supported on the positive support.
std::vector<double> support_gradient(const BlockLaw& u) {
  const int n = u.alphabet_size();
  const ContextMarginal eta = context_marginal(u);
  std::vector<double> g(u.size(), 0.0);
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(eta.masses.size()); ++c)
    for (int a = 0; a < n; ++a) {
      const double v = u(c, a);
      if (v > 0.0) g[c * n + a] = std::log(eta.masses[c]) - std::log(v);
    }
  return g;
}

double dot(const std::vector<double>& g, const Eigen::VectorXd& d) {
  double s = 0.0;
  for (std::int64_t i = 0; i < d.size(); ++i) s += g[i] * d[i];
  return s;
}

double bilinear(const BlockLaw& u, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  std::vector<double> ha(a.data(), a.data() + a.size());
  std::vector<double> hb(b.data(), b.data() + b.size());
  return hessian_bilinear_raw(u.probs(), ha, hb, u.alphabet_size(), u.memory());
}

// alpha(c) = rowsum h / eta(c) is the only candidate rescaling factor;
// returns the max pointwise defect of h(c,.) = alpha(c) u(c,.).
double rescaling_residual(const BlockLaw& u, const Eigen::VectorXd& h,
                          std::vector<double>* alpha_out = nullptr) {
  const int n = u.alphabet_size();
  const ContextMarginal eta = context_marginal(u);
  std::vector<double> alpha(eta.masses.size(), 0.0);
  double worst = 0.0;
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(eta.masses.size()); ++c) {
    double rowsum = 0.0;
    for (int a = 0; a < n; ++a) rowsum += h[c * n + a];
    alpha[c] = eta.masses[c] > 0.0 ? rowsum / eta.masses[c] : 0.0;
    for (int a = 0; a < n; ++a)
      worst = std::max(worst, std::abs(h[c * n + a] - alpha[c] * u(c, a)));
  }
  if (alpha_out) *alpha_out = std::move(alpha);
  return worst;
}

bool negative_definite(const Eigen::MatrixXd& m, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es) {
  if (m.rows() == 0) return true;
  es.compute(m);
  const double scale = std::max(std::abs(m.trace()) / m.rows(), 1.0);
  return es.eigenvalues().maxCoeff() <= -1e-10 * scale;
}

}  // namespace

double hessian_quadratic_form(const BlockLaw& u, const std::vector<double>& h) {
  return hessian_bilinear_raw(u.probs(), h, h, u.alphabet_size(), u.memory());
}

NullDirectionReport null_directions(const BlockLaw& u, const TangentBasis& basis) {
  NullDirectionReport rep;
  const int d = basis.dimension();
  rep.eigenvalues.resize(d);
  if (d == 0) return rep;

  Eigen::MatrixXd hess(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      hess(i, j) = hess(j, i) = bilinear(u, basis.vectors.col(i), basis.vectors.col(j));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
  rep.eigenvalues = es.eigenvalues();
  const double scale = std::max(rep.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < d; ++i) {
    if (std::abs(rep.eigenvalues[i]) > 1e-10 * scale) continue;
    Eigen::VectorXd h = basis.vectors * es.eigenvectors().col(i);
    h /= h.norm();
    const double res = rescaling_residual(u, h);
    rep.worst_proportionality_residual = std::max(rep.worst_proportionality_residual, res);
    if (res > 1e-8) rep.all_row_rescaling = false;
    rep.null_vectors.push_back(std::move(h));
  }
  return rep;
}

std::optional<Eigen::VectorXd> tangent_row_rescaling(const BlockLaw& u, const TangentBasis& basis,
                                                     std::vector<double>* alpha_out) {
  const int d = basis.dimension();
  if (d == 0) return std::nullopt;
  const int n = u.alphabet_size();
  const std::int64_t nc = u.num_contexts();
  const std::int64_t dim = u.size();

  // Nonzero intersection of span(basis) with the row-rescaling space at u:
  // nullspace of [B, -R] where R(:, c) is row c of u embedded.
  Eigen::MatrixXd m(dim, d + nc);
  m.leftCols(d) = basis.vectors;
  m.rightCols(nc).setZero();
  for (std::int64_t c = 0; c < nc; ++c)
    for (int a = 0; a < n; ++a) m(c * n + a, static_cast<Eigen::Index>(d + c)) = -u(c, a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  for (Eigen::Index j = d + nc - 1; j >= 0; --j) {
    const double s = j < sv.size() ? sv(j) : 0.0;
    if (s > 1e-10 * std::max(smax, 1.0)) break;
    Eigen::VectorXd h = basis.vectors * svd.matrixV().col(j).head(d);
    if (h.norm() < 1e-8) continue;  // degenerate: lives in a zero row of u
    h /= h.norm();
    std::vector<double> alpha;
    if (rescaling_residual(u, h, &alpha) <= 1e-10) {
      if (alpha_out) *alpha_out = std::move(alpha);
      return h;
    }
  }
  return std::nullopt;
}

StrictConcavityReport strict_concavity_on_face(const std::vector<BlockLaw>& samples,
                                               const TangentBasis& basis) {
  StrictConcavityReport rep;
  for (const BlockLaw& u : samples) {
    std::vector<double> alpha;
    if (const auto h = tangent_row_rescaling(u, basis, &alpha)) {
      rep.strictly_concave = false;
      rep.witness =
          ConcavityWitness{u, std::vector<double>(h->data(), h->data() + h->size()),
                           std::move(alpha)};
      return rep;
    }
  }
  return rep;
}

LocalChart build_local_chart(const BlockLaw& base, const ConstraintSystem& system,
                             const FeatureSet& features) {
  const TangentBasis basis = tangent_space_basis(system);
  const Continuation cont = local_continuation_map(system, features);

  const int m = static_cast<int>(features.features.size());
  const int d = basis.dimension();
  if (d == 0)
    return LocalChart{base, cont.right_inverse, Eigen::MatrixXd(system.dim(), 0), system.face};
  Eigen::MatrixXd moment(m, d);
  for (int j = 0; j < m; ++j) {
    Eigen::Map<const Eigen::VectorXd> g(features.features[j].table.data(),
                                        features.features[j].table.size());
    for (int k = 0; k < d; ++k) moment(j, k) = g.dot(basis.vectors.col(k));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(moment, Eigen::ComputeFullV);
  int rank = 0;
  const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-10 * smax) ++rank;

  LocalChart chart{base, cont.right_inverse,
                   basis.vectors * svd.matrixV().rightCols(d - rank), system.face};
  return chart;
}

LocalChart binary_fixed_mean_chart(double m) {
  if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("mean must lie in (0,1)");
  BlockLaw base = binary_fixed_mean_maximizer(m).law;
  Eigen::MatrixXd vb(4, 1), vq(4, 1);
  vb << -1, 0, 0, 1;
  vq << -1, 1, 1, -1;
  return LocalChart{std::move(base), vb, vq, SupportFace::full(4)};
}

FiberHessian fiber_hessian(const LocalChart& chart) {
  const int k = static_cast<int>(chart.xi_directions.cols());
  const int m = static_cast<int>(chart.b_directions.cols());
  FiberHessian fh;
  fh.xi_xi.resize(k, k);
  fh.xi_b.resize(k, m);
  fh.b_b.resize(m, m);
  fh.grad_xi.resize(k);
  fh.grad_b.resize(m);
  const std::vector<double> g = support_gradient(chart.base);
  for (int i = 0; i < k; ++i) {
    fh.grad_xi[i] = dot(g, chart.xi_directions.col(i));
    for (int j = i; j < k; ++j)
      fh.xi_xi(i, j) = fh.xi_xi(j, i) =
          bilinear(chart.base, chart.xi_directions.col(i), chart.xi_directions.col(j));
    for (int j = 0; j < m; ++j)
      fh.xi_b(i, j) = bilinear(chart.base, chart.xi_directions.col(i), chart.b_directions.col(j));
  }
  for (int i = 0; i < m; ++i) {
    fh.grad_b[i] = dot(g, chart.b_directions.col(i));
    for (int j = i; j < m; ++j)
      fh.b_b(i, j) = fh.b_b(j, i) =
          bilinear(chart.base, chart.b_directions.col(i), chart.b_directions.col(j));
  }
  return fh;
}

Eigen::MatrixXd selector_jacobian(const LocalChart& chart) {
  const FiberHessian fh = fiber_hessian(chart);
  if (fh.grad_xi.size() == 0) return Eigen::MatrixXd(0, chart.b_directions.cols());
  if (fh.grad_xi.lpNorm<Eigen::Infinity>() > 1e-8)
    throw std::domain_error("selector not differentiable here");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  if (!negative_definite(fh.xi_xi, es))
    throw std::domain_error("selector not differentiable here");
  return -fh.xi_xi.ldlt().solve(fh.xi_b);
}

double maximize_over_fiber(const LocalChart& chart, const Eigen::VectorXd& u_start_shift) {
  const int n = chart.base.alphabet_size();
  const int r = chart.base.memory();
  const std::int64_t dim = chart.base.size();
  const Eigen::MatrixXd& X = chart.xi_directions;
  const int k = static_cast<int>(X.cols());

  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(chart.base.probs().data(), dim);
  u += u_start_shift;
  auto value = [&](const Eigen::VectorXd& v) {
    return entropy_rate_raw(std::vector<double>(v.data(), v.data() + dim), n, r);
  };
  if (k == 0) return value(u);

  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> uv(u.data(), u.data() + dim);
    const std::vector<double> g = entropy_gradient_raw(uv, n, r);
    Eigen::VectorXd gx(k);
    for (int i = 0; i < k; ++i) gx[i] = dot(g, X.col(i));
    if (gx.lpNorm<Eigen::Infinity>() <= 1e-12) break;

    Eigen::MatrixXd hx(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) {
        std::vector<double> hi(X.col(i).data(), X.col(i).data() + dim);
        std::vector<double> hj(X.col(j).data(), X.col(j).data() + dim);
        hx(i, j) = hx(j, i) = hessian_bilinear_raw(uv, hi, hj, n, r);
      }
    Eigen::VectorXd step = (-hx).ldlt().solve(gx);
    if (!step.allFinite() || step.dot(gx) <= 0.0) step = gx;

    const Eigen::VectorXd dir = X * step;
    double alpha = 1.0;
    for (std::int64_t i = 0; i < dim; ++i)
      if (dir[i] < 0.0 && chart.face.allows(i))
        alpha = std::min(alpha, 0.9 * (u[i] - 1e-15) / -dir[i]);
    const double v0 = value(u);
    const double slope = gx.dot(step);
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::VectorXd cand = u + alpha * dir;
      if (cand.minCoeff() >= 0.0 && value(cand) >= v0 + 1e-4 * alpha * slope) {
        u = std::move(cand);
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return value(u);
}

EnvelopeReport envelope_check(const LocalChart& chart, double delta) {
  const FiberHessian fh = fiber_hessian(chart);
  if (fh.grad_xi.size() > 0 && fh.grad_xi.lpNorm<Eigen::Infinity>() > 1e-8)
    throw std::domain_error("selector not differentiable here");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  if (!negative_definite(fh.xi_xi, es))
    throw std::domain_error("selector not differentiable here");

  const int m = static_cast<int>(chart.b_directions.cols());
  EnvelopeReport rep;
  rep.dv = fh.grad_b;
  rep.d2v = fh.b_b;
  if (fh.xi_xi.rows() > 0)
    rep.d2v -= fh.xi_b.transpose() * fh.xi_xi.ldlt().solve(fh.xi_b);

  auto resolved_value = [&](const Eigen::VectorXd& db) {
    return maximize_over_fiber(chart, chart.b_directions * db);
  };
  const double v0 = resolved_value(Eigen::VectorXd::Zero(m));

  rep.dv_fd.resize(m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e[j] = delta;
    rep.dv_fd[j] = (resolved_value(e) - resolved_value(-e)) / (2.0 * delta);
  }

  const double d2 = std::max(delta, 1e-3);
  rep.d2v_fd.resize(m, m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(m);
    ej[j] = d2;
    rep.d2v_fd(j, j) = (resolved_value(ej) - 2.0 * v0 + resolved_value(-ej)) / (d2 * d2);
    for (int l = j + 1; l < m; ++l) {
      Eigen::VectorXd el = Eigen::VectorXd::Zero(m);
      el[l] = d2;
      rep.d2v_fd(j, l) = rep.d2v_fd(l, j) =
          (resolved_value(ej + el) - resolved_value(ej - el) - resolved_value(el - ej) +
           resolved_value(-ej - el)) /
          (4.0 * d2 * d2);
    }
  }
  rep.first_order_error = (rep.dv - rep.dv_fd).lpNorm<Eigen::Infinity>();
  rep.second_order_error = (rep.d2v - rep.d2v_fd).lpNorm<Eigen::Infinity>();
  return rep;
}

std::vector<GapExpansionRow> gap_quadratic_expansion_check(const LocalChart& chart,
                                                           const Eigen::VectorXd& fiber_direction,
                                                           const std::vector<double>& deltas) {
  const FiberHessian fh = fiber_hessian(chart);
  const Eigen::MatrixXd k_mat = -fh.xi_xi;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k_mat);
  if (k_mat.rows() == 0 || es.eigenvalues().minCoeff() <= 0.0)
    throw std::domain_error("curvature matrix not positive definite");

  const std::int64_t dim = chart.base.size();
  const Eigen::VectorXd u0 = Eigen::Map<const Eigen::VectorXd>(chart.base.probs().data(), dim);
  const double v_star =
      entropy_rate_raw(chart.base.probs(), chart.base.alphabet_size(), chart.base.memory());
  const double quad = fiber_direction.dot(k_mat * fiber_direction);
  const Eigen::VectorXd dir = chart.xi_directions * fiber_direction;

  std::vector<GapExpansionRow> rows;
  for (double delta : deltas) {
    Eigen::VectorXd u = u0 + delta * dir;
    if (u.minCoeff() < 0.0) throw std::domain_error("left face");
    GapExpansionRow row;
    row.delta = delta;
    row.gap = v_star - entropy_rate_raw(std::vector<double>(u.data(), u.data() + dim),
                                        chart.base.alphabet_size(), chart.base.memory());
    row.predicted = 0.5 * delta * delta * quad;
    row.ratio = row.predicted != 0.0 ? row.gap / row.predicted : (row.gap == 0.0 ? 1.0 : 0.0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fiberent
