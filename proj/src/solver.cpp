#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "geometry.hpp"
#include "rng.hpp"

namespace fiberent {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Gradient restricted to the face; off-face coordinates stay at exactly 0.
Eigen::VectorXd face_gradient(const Eigen::VectorXd& u, const ConstraintSystem& sys) {
  const int n = sys.alphabet;
  const std::int64_t nc = pow_int(n, sys.r);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(u.size());
  for (std::int64_t c = 0; c < nc; ++c) {
    double eta = 0.0;
    for (int a = 0; a < n; ++a) eta += u(c * n + a);
    for (int a = 0; a < n; ++a) {
      const std::int64_t i = c * n + a;
      if (!sys.face.mask[i]) continue;
      g(i) = std::log(eta) - std::log(u(i));
    }
  }
  return g;
}

Eigen::MatrixXd tangent_hessian(const Eigen::VectorXd& u, const TangentBasis& basis,
                                const ConstraintSystem& sys) {
  const int d = basis.dimension();
  const std::vector<double> us = to_std(u);
  Eigen::MatrixXd h(d, d);
  for (int i = 0; i < d; ++i) {
    const std::vector<double> hi = to_std(basis.vectors.col(i));
    for (int j = i; j < d; ++j) {
      const std::vector<double> hj = to_std(basis.vectors.col(j));
      h(i, j) = h(j, i) = hessian_bilinear_raw(us, hi, hj, sys.alphabet, sys.r);
    }
  }
  return h;
}

}  // namespace

SolveResult maximize(const ConstraintSystem& sys, const SolverConfig& config,
                     const FeatureSet& features) {
  SolveResult res;
  const FeasiblePoint fp = find_feasible_point(sys);
  res.infeasibility_residual = fp.residual;
  if (fp.status != FeasiblePoint::Status::Found) {
    res.status = SolveStatus::Infeasible;
    return res;
  }
  const TangentBasis basis = tangent_space_basis(sys);
  const int d = basis.dimension();
  const std::int64_t dim = sys.dim();

  Eigen::VectorXd u(dim);
  for (std::int64_t i = 0; i < dim; ++i) u(i) = fp.law->probs()[i];
  const Eigen::VectorXd u_feas = u;

  if (d == 0) {
    res.status = SolveStatus::Converged;
    res.u_star = *fp.law;
    res.value_nats = entropy_rate(*fp.law).value_nats;
    res.certificate = kkt_multipliers(*fp.law, sys, features);
    return res;
  }

  Eigen::VectorXd t_ref = Eigen::VectorXd::Zero(d);
  const bool has_ball = config.neighborhood_radius > 0.0 && config.reference.has_value();
  if (has_ball) {
    Eigen::VectorXd uref(dim);
    for (std::int64_t i = 0; i < dim; ++i) uref(i) = (*config.reference)[i];
    t_ref = basis.vectors.transpose() * (uref - u_feas);
  }
  Eigen::VectorXd t = Eigen::VectorXd::Zero(d);
  if (has_ball && t.size() > 0) {
    // Start inside the ball.
    const double dist = (t - t_ref).norm();
    if (dist > config.neighborhood_radius) {
      // Pull toward the reference while staying on the face.
      Eigen::VectorXd dir = (t_ref - t).normalized();
      double alpha = dist - 0.5 * config.neighborhood_radius;
      const Eigen::VectorXd h = basis.vectors * dir;
      for (std::int64_t i = 0; i < dim; ++i)
        if (h(i) < 0.0 && sys.face.mask[i])
          alpha = std::min(alpha, (u(i) - config.barrier_floor) / (-h(i)));
      t += alpha * dir;
      u += alpha * h;
    }
  }

  double value = entropy_rate_raw(to_std(u), sys.alphabet, sys.r);
  int iter = 0;
  bool converged = false;
  for (; iter < config.max_iters; ++iter) {
    const Eigen::VectorXd g = face_gradient(u, sys);
    const Eigen::VectorXd gt = basis.vectors.transpose() * g;
    if (gt.norm() <= config.grad_tol) {
      converged = true;
      break;
    }
    Eigen::MatrixXd hneg = -tangent_hessian(u, basis, sys);
    const double scale = std::max(1.0, hneg.trace());
    hneg.diagonal().array() += 1e-12 * scale;
    Eigen::VectorXd dir = hneg.ldlt().solve(gt);
    if (gt.dot(dir) <= 0.0 || !dir.allFinite()) dir = gt;

    const Eigen::VectorXd h = basis.vectors * dir;
    double alpha = 1.0;
    for (std::int64_t i = 0; i < dim; ++i)
      if (h(i) < 0.0 && sys.face.mask[i])
        alpha = std::min(alpha, (u(i) - config.barrier_floor) / (-h(i)));
    if (has_ball) {
      const Eigen::VectorXd w = t - t_ref;
      const double a2 = dir.squaredNorm();
      const double b = dir.dot(w);
      const double c2 = w.squaredNorm() - config.neighborhood_radius * config.neighborhood_radius;
      const double disc = b * b - a2 * c2;
      if (disc >= 0.0 && a2 > 0.0) {
        const double root = (-b + std::sqrt(disc)) / a2;
        if (root <= 0.0) {
          converged = true;  // boundary of the neighborhood, moving outward
          break;
        }
        alpha = std::min(alpha, root);
      }
    }
    const double slope = gt.dot(dir);
    bool stepped = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd u_new = u + alpha * h;
      const double v_new = entropy_rate_raw(to_std(u_new), sys.alphabet, sys.r);
      if (v_new >= value + 1e-4 * alpha * slope) {
        u = u_new;
        t += alpha * dir;
        value = v_new;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped) {
      converged = gt.norm() <= 100.0 * config.grad_tol;
      break;
    }
  }

  res.status = converged ? SolveStatus::Converged : SolveStatus::MaxIters;
  res.iterations = iter;
  BlockLaw law(sys.alphabet, sys.r, to_std(u), 1e-8);
  res.value_nats = entropy_rate(law).value_nats;
  for (std::int64_t i = 0; i < dim; ++i)
    if (sys.face.mask[i] && u(i) <= 2.0 * config.barrier_floor) res.face_shrink = true;
  res.certificate = kkt_multipliers(law, sys, features);
  res.u_star = std::move(law);
  return res;
}

KKTCertificate kkt_multipliers(const BlockLaw& u_star, const ConstraintSystem& sys,
                               const FeatureSet& features) {
  const int n = sys.alphabet;
  const int r = sys.r;
  const std::int64_t nc = pow_int(n, r);
  const int m = static_cast<int>(features.features.size());
  const ContextMarginal eta = context_marginal(u_star);

  std::vector<std::int64_t> active;
  for (std::int64_t i = 0; i < u_star.size(); ++i)
    if (sys.face.mask[i] && u_star.at(i) > 0.0) active.push_back(i);

  const int unknowns = 1 + m + static_cast<int>(nc) - 1;  // psi(0) = 0 gauge
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(active.size(), unknowns);
  Eigen::VectorXd rhs(active.size());
  for (std::size_t row = 0; row < active.size(); ++row) {
    const std::int64_t i = active[row];
    const std::int64_t c = i / n;
    const int sym = static_cast<int>(i % n);
    const std::int64_t sfx = suffix_context(c, sym, n, r);
    a(row, 0) = 1.0;
    for (int j = 0; j < m; ++j) a(row, 1 + j) = features.features[j].table[i];
    if (c > 0) a(row, 1 + m + c - 1) += 1.0;
    if (sfx > 0) a(row, 1 + m + sfx - 1) -= 1.0;
    rhs(row) = -std::log(u_star.at(i) / eta.masses[c]);
  }
  const Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(rhs);

  KKTCertificate cert;
  cert.gamma = x(0);
  cert.lambda.resize(m);
  for (int j = 0; j < m; ++j) cert.lambda[j] = x(1 + j);
  cert.psi.assign(nc, 0.0);
  for (std::int64_t c = 1; c < nc; ++c) cert.psi[c] = x(1 + m + c - 1);
  cert.stationarity_residual = (a * x - rhs).lpNorm<Eigen::Infinity>();
  return cert;
}

KernelRepresentation kernel_representation(const KKTCertificate& cert, const FeatureSet& features,
                                           const ConstraintSystem& sys) {
  const int n = sys.alphabet;
  const int r = sys.r;
  const std::int64_t nc = pow_int(n, r);
  const int m = static_cast<int>(features.features.size());

  KernelRepresentation rep;
  rep.simplified_rowwise = true;
  rep.kernel.alphabet = n;
  rep.kernel.r = r;
  rep.kernel.rows.resize(nc);
  for (std::int64_t c = 0; c < nc; ++c) {
    std::vector<double> w(n, 0.0);
    double total = 0.0;
    double psi0 = std::numeric_limits<double>::quiet_NaN();
    bool any = false;
    for (int a = 0; a < n; ++a) {
      const std::int64_t i = c * n + a;
      if (!sys.face.mask[i]) continue;
      double expo = 0.0;
      for (int j = 0; j < m; ++j) expo -= cert.lambda[j] * features.features[j].table[i];
      const double psi_sfx = cert.psi[suffix_context(c, a, n, r)];
      expo += psi_sfx;
      if (!any) {
        psi0 = psi_sfx;
        any = true;
      } else if (std::abs(psi_sfx - psi0) > 1e-12) {
        rep.simplified_rowwise = false;
      }
      w[a] = std::exp(expo);
      total += w[a];
    }
    if (any && total > 0.0) {
      for (int a = 0; a < n; ++a) w[a] /= total;
      rep.kernel.rows[c] = std::move(w);
    }
  }
  return rep;
}

UniquenessReport uniqueness_diagnostic(const ConstraintSystem& sys, int samples,
                                       std::uint64_t seed) {
  UniquenessReport rep;
  const FeasiblePoint fp = find_feasible_point(sys);
  if (fp.status != FeasiblePoint::Status::Found) return rep;
  const TangentBasis basis = tangent_space_basis(sys);
  const int d = basis.dimension();
  if (d == 0) return rep;

  const std::int64_t dim = sys.dim();
  Eigen::VectorXd center(dim);
  for (std::int64_t i = 0; i < dim; ++i) center(i) = fp.law->probs()[i];

  CounterRng rng(seed);
  const int n = sys.alphabet;
  const std::int64_t nc = pow_int(n, sys.r);

  const auto draw = [&]() {
    Eigen::VectorXd dir(d);
    for (int k = 0; k < d; ++k) dir(k) = 2.0 * rng.next_uniform() - 1.0;
    if (dir.norm() == 0.0) dir(0) = 1.0;
    dir.normalize();
    const Eigen::VectorXd h = basis.vectors * dir;
    double alpha = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < dim; ++i)
      if (h(i) < 0.0 && sys.face.mask[i]) alpha = std::min(alpha, center(i) / (-h(i)));
    if (!std::isfinite(alpha)) alpha = 1.0;
    return (center + (0.8 * rng.next_uniform()) * alpha * h).eval();
  };

  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd uv = draw();
    Eigen::VectorXd vv = draw();
    ++rep.pairs_tested;
    // Constructed check at the first few points: a tangent row-rescaling
    // direction yields a proportional pair directly.
    if (s < 10) {
      const BlockLaw u_law(n, sys.r, to_std(uv), 1e-6);
      if (const auto h = tangent_row_rescaling(u_law, basis)) {
        double alpha = std::numeric_limits<double>::infinity();
        for (std::int64_t i = 0; i < dim; ++i)
          if ((*h)(i) < 0.0 && sys.face.mask[i]) alpha = std::min(alpha, uv(i) / (-(*h)(i)));
        if (!std::isfinite(alpha)) alpha = 1.0;
        vv = uv + 0.5 * alpha * (*h);
      }
    }
    if ((uv - vv).lpNorm<Eigen::Infinity>() <= 1e-12) continue;
    bool proportional = true;
    for (std::int64_t c = 0; c < nc && proportional; ++c) {
      double eu = 0.0, ev = 0.0;
      for (int a = 0; a < n; ++a) {
        eu += uv(c * n + a);
        ev += vv(c * n + a);
      }
      for (int a = 0; a < n; ++a)
        if (std::abs(ev * uv(c * n + a) - eu * vv(c * n + a)) > 1e-10) {
          proportional = false;
          break;
        }
    }
    if (proportional) {
      rep.strictly_concave_on_samples = false;
      rep.flat_pair = {BlockLaw(n, sys.r, to_std(uv), 1e-6),
                       BlockLaw(n, sys.r, to_std(vv), 1e-6)};
      return rep;
    }
  }
  return rep;
}

BlockLaw brute_force_maximizer(const ConstraintSystem& sys, double resolution) {
  const TangentBasis basis = tangent_space_basis(sys);
  const int d = basis.dimension();
  if (d > 3 || sys.dim() > 16) throw std::domain_error("oracle scope exceeded");
  const FeasiblePoint fp = find_feasible_point(sys);
  if (fp.status != FeasiblePoint::Status::Found) throw std::domain_error("infeasible system");
  if (d == 0) return *fp.law;

  const std::int64_t dim = sys.dim();
  Eigen::VectorXd center(dim);
  for (std::int64_t i = 0; i < dim; ++i) center(i) = fp.law->probs()[i];

  // Per-axis bounds keeping the segment nonnegative; joint feasibility is
  // re-checked pointwise.
  std::vector<double> lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    double l = -std::numeric_limits<double>::infinity();
    double h = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < dim; ++i) {
      const double v = basis.vectors(i, k);
      if (v > 1e-14) l = std::max(l, -center(i) / v);
      if (v < -1e-14) h = std::min(h, center(i) / (-v));
    }
    lo[k] = std::isfinite(l) ? l : -1.0;
    hi[k] = std::isfinite(h) ? h : 1.0;
  }

  std::vector<double> best_t(d, 0.0);
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<double> u(dim);

  const auto evaluate = [&](const std::vector<double>& t) {
    for (std::int64_t i = 0; i < dim; ++i) {
      double v = center(i);
      for (int k = 0; k < d; ++k) v += t[k] * basis.vectors(i, k);
      if (v < -1e-12) return -std::numeric_limits<double>::infinity();
      u[i] = std::max(v, 0.0);
    }
    return entropy_rate_raw(u, sys.alphabet, sys.r);
  };

  const auto sweep = [&](const std::vector<double>& lo_s, const std::vector<double>& hi_s,
                         double step) {
    std::vector<std::int64_t> counts(d);
    for (int k = 0; k < d; ++k)
      counts[k] = static_cast<std::int64_t>(std::floor((hi_s[k] - lo_s[k]) / step)) + 1;
    std::vector<std::int64_t> ix(d, 0);
    std::vector<double> t(d);
    while (true) {
      for (int k = 0; k < d; ++k) t[k] = lo_s[k] + ix[k] * step;
      const double val = evaluate(t);
      if (val > best_val) {  // lexicographic lowest t wins ties
        best_val = val;
        best_t = t;
      }
      int k = d - 1;
      while (k >= 0 && ++ix[k] >= counts[k]) ix[k--] = 0;
      if (k < 0) break;
    }
  };

  sweep(lo, hi, resolution);
  std::vector<double> lo2(d), hi2(d);
  for (int k = 0; k < d; ++k) {
    lo2[k] = std::max(lo[k], best_t[k] - resolution);
    hi2[k] = std::min(hi[k], best_t[k] + resolution);
  }
  sweep(lo2, hi2, resolution / 10.0);

  evaluate(best_t);
  double total = 0.0;
  for (std::int64_t i = 0; i < dim; ++i) total += u[i];
  for (std::int64_t i = 0; i < dim; ++i) u[i] /= total;
  return BlockLaw(sys.alphabet, sys.r, u, 1e-6);
}

}  // namespace fiberent
