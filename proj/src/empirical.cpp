#include "empirical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

namespace fiberent {

std::vector<double> EmpiricalEstimate::probs() const {
  const double denom = static_cast<double>(n - r);
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = counts[i] / denom;
  return p;
}

EmpiricalEstimate empirical_block_law(const SamplePath& path, int alphabet, int r) {
  const std::int64_t n = static_cast<std::int64_t>(path.symbols.size());
  if (n < r + 1) throw std::invalid_argument("path too short");
  EmpiricalEstimate est{alphabet, r, std::vector<std::int64_t>(pow_int(alphabet, r + 1), 0), n};
  std::int64_t window = 0;
  const std::int64_t mod = pow_int(alphabet, r);
  for (int t = 0; t < r; ++t) window = window * alphabet + path.symbols[t];
  for (std::int64_t t = r; t < n; ++t) {
    window = (window % mod) * alphabet + path.symbols[t];
    ++est.counts[window];
  }
  return est;
}

std::vector<double> empirical_targets(const EmpiricalEstimate& est, const FeatureSet& features) {
  const std::vector<double> u = est.probs();
  std::vector<double> b(features.features.size(), 0.0);
  for (std::size_t j = 0; j < features.features.size(); ++j) {
    const std::vector<double>& g = features.features[j].table;
    if (g.size() != u.size()) throw std::invalid_argument("feature table size mismatch");
    for (std::size_t i = 0; i < u.size(); ++i) b[j] += u[i] * g[i];
  }
  return b;
}

SolveResult empirical_maximizer(const SamplePath& path, const FeatureSet& features,
                                const SupportFace& face, const std::vector<double>& reference,
                                double neighborhood_radius, const SolverConfig& config) {
  const EmpiricalEstimate est = empirical_block_law(path, features.alphabet, features.r);
  FeatureSet fs = features;
  fs.targets = empirical_targets(est, features);
  const ConstraintSystem system = build_constraint_system(fs, face);
  SolverConfig cfg = config;
  cfg.reference = reference;
  cfg.neighborhood_radius = neighborhood_radius;
  return maximize(system, cfg, fs);
}

namespace {

int thread_cap() {
  if (const char* env = std::getenv("FIBERENT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

ExperimentReport consistency_experiment(const ExperimentSpec& spec) {
  const RandomMapping mapping = build_random_mapping(spec.true_kernel);
  const std::size_t cells = spec.n_grid.size() * spec.seeds.size();

  ExperimentReport rep;
  rep.n_grid = spec.n_grid;
  rep.cells.resize(cells);

  SupportFace face = SupportFace::full(static_cast<std::int64_t>(spec.u_star.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells) return;
      const std::int64_t n = spec.n_grid[idx / spec.seeds.size()];
      const std::uint64_t seed = spec.seeds[idx % spec.seeds.size()];
      ExperimentCell& cell = rep.cells[idx];
      cell.n = n;
      cell.seed = seed;
      const SamplePath path = simulate(mapping, spec.eta, n, seed);
      const SolveResult res = empirical_maximizer(path, spec.features, face, spec.u_star,
                                                  spec.neighborhood_radius, spec.solver);
      cell.status = res.status;
      if (res.u_star) {
        cell.value_nats = res.value_nats;
        double err = 0.0;
        for (std::size_t i = 0; i < spec.u_star.size(); ++i)
          err = std::max(err, std::abs(res.u_star->probs()[i] - spec.u_star[i]));
        cell.error = err;
      }
    }
  };

  const int nthreads = std::min<int>(thread_cap(), static_cast<int>(cells));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::vector<double> logn, logm;
  for (std::size_t gi = 0; gi < spec.n_grid.size(); ++gi) {
    std::vector<double> errs;
    for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
      const ExperimentCell& cell = rep.cells[gi * spec.seeds.size() + si];
      if (cell.status == SolveStatus::Converged) errs.push_back(cell.error);
    }
    const double med = median(std::move(errs));
    rep.median_error.push_back(med);
    if (std::isfinite(med) && med > 0.0) {
      logn.push_back(std::log(static_cast<double>(spec.n_grid[gi])));
      logm.push_back(std::log(med));
    }
  }
  if (logn.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
      sx += logn[i];
      sy += logm[i];
      sxx += logn[i] * logn[i];
      sxy += logn[i] * logm[i];
    }
    const double k = static_cast<double>(logn.size());
    rep.loglog_slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  return rep;
}

std::vector<double> stationary_projection(const EmpiricalEstimate& est) {
  const int n = est.alphabet;
  const int r = est.r;
  const std::int64_t dim = pow_int(n, r + 1);
  const std::int64_t nr = pow_int(n, r);
  // Rows: stationarity balance per context plus normalization.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nr + 1, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr + 1);
  const std::int64_t nr1 = pow_int(n, r - 1);
  for (std::int64_t c = 0; c < nr; ++c) {
    for (int s = 0; s < n; ++s) a(c, c * n + s) -= 1.0;  // left marginal
    for (int alpha = 0; alpha < n; ++alpha) {
      // blocks (alpha, c): right marginal of context c.
      const std::int64_t b = alpha * nr + c;
      (void)nr1;
      a(c, b) += 1.0;
    }
  }
  a.row(nr).setOnes();
  rhs(nr) = 1.0;

  const std::vector<double> u = est.probs();
  const Eigen::Map<const Eigen::VectorXd> u0(u.data(), dim);
  // Min-norm correction: project u0 onto {a x = rhs}.
  const Eigen::VectorXd resid = rhs - a * u0;
  const Eigen::VectorXd corr =
      a.completeOrthogonalDecomposition().solve(resid);
  Eigen::VectorXd out = u0 + corr;
  return std::vector<double>(out.data(), out.data() + dim);
}

}  // namespace fiberent
