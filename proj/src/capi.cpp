#include "fiberent.h"

#include <cstring>
#include <exception>
#include <string>

#include <json.hpp>

#include "aliased.hpp"
#include "closed_form.hpp"
#include "empirical.hpp"
#include "entropy.hpp"
#include "geometry.hpp"
#include "json_io.hpp"
#include "realization.hpp"
#include "solver.hpp"

using nlohmann::json;
using namespace fiberent;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fib_status classify(const std::string& what) {
  g_last_error = what;
  if (what.find("scope") != std::string::npos) return FIB_ERR_SCOPE;
  if (what.find("infeasible") != std::string::npos || what.find("left face") != std::string::npos)
    return FIB_ERR_INFEASIBLE;
  return FIB_ERR_NUMERIC;
}

template <typename Fn>
fib_status guarded(char** out, Fn&& fn) {
  if (out == nullptr) {
    g_last_error = "null output pointer";
    return FIB_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  try {
    *out = dup_string(fn());
    return FIB_OK;
  } catch (const json::parse_error& e) {
    g_last_error = e.what();
    return FIB_ERR_PARSE;
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return FIB_ERR_PARSE;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return FIB_ERR_INVALID_ARGUMENT;
  } catch (const std::domain_error& e) {
    return classify(e.what());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FIB_ERR_NUMERIC;
  }
}

json parse_required(const char* text, const char* name) {
  if (text == nullptr) throw std::invalid_argument(std::string("missing input: ") + name);
  return json::parse(text);
}

ConditionalKernel kernel_from_json(const json& j) {
  ConditionalKernel p;
  p.alphabet = j.at("alphabet").get<int>();
  p.r = j.at("r").get<int>();
  const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
  const std::int64_t nc = pow_int(p.alphabet, p.r);
  if (static_cast<std::int64_t>(rows.size()) != nc)
    throw std::invalid_argument("invalid field: rows");
  p.rows.resize(nc);
  for (std::int64_t c = 0; c < nc; ++c) {
    if (rows[c].empty()) continue;  // inactive context
    if (static_cast<int>(rows[c].size()) != p.alphabet)
      throw std::invalid_argument("invalid field: rows");
    p.rows[c] = rows[c];
  }
  return p;
}

SolverConfig config_from_json(const json& j) {
  SolverConfig cfg;
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.grad_tol = j.value("grad_tol", cfg.grad_tol);
  cfg.barrier_floor = j.value("barrier_floor", cfg.barrier_floor);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("reference")) cfg.reference = j.at("reference").get<std::vector<double>>();
  cfg.neighborhood_radius = j.value("radius", cfg.neighborhood_radius);
  return cfg;
}

}  // namespace

extern "C" {

uint32_t fib_abi_version(void) { return 1; }

const char* fib_last_error(void) { return g_last_error.c_str(); }

void fib_string_free(char* s) { delete[] s; }

struct fib_law {
  BlockLaw law;
};

fib_status fib_law_parse(const char* text, fib_law** out) {
  if (out == nullptr) {
    g_last_error = "null output pointer";
    return FIB_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  char* dump = nullptr;
  const fib_status st = guarded(&dump, [&]() {
    *out = new fib_law{block_law_from_json(parse_required(text, "law"))};
    return std::string();
  });
  fib_string_free(dump);
  return st;
}

void fib_law_free(fib_law* law) { delete law; }

fib_status fib_law_dump(const fib_law* law, char** json_out) {
  return guarded(json_out, [&]() {
    if (law == nullptr) throw std::invalid_argument("null law handle");
    return block_law_to_json(law->law).dump();
  });
}

static fib_status law_scalar(const fib_law* law, double* out, double (*fn)(const BlockLaw&)) {
  if (out == nullptr || law == nullptr) {
    g_last_error = "null pointer";
    return FIB_ERR_INVALID_ARGUMENT;
  }
  try {
    *out = fn(law->law);
    return FIB_OK;
  } catch (const std::exception& e) {
    return classify(e.what());
  }
}

fib_status fib_law_entropy_rate(const fib_law* law, double* out) {
  return law_scalar(law, out, [](const BlockLaw& u) { return entropy_rate(u).value_nats; });
}

fib_status fib_law_conditional_mutual_information(const fib_law* law, double* out) {
  return law_scalar(law, out, [](const BlockLaw& u) { return conditional_mutual_information(u); });
}

fib_status fib_law_stationarity_residual(const fib_law* law, double* out) {
  return law_scalar(law, out, [](const BlockLaw& u) { return stationarity_residual(u); });
}

fib_status fib_solve(const char* features_json, const char* face_json, const char* config_json,
                     char** result_json) {
  return guarded(result_json, [&]() {
    const FeatureSet fs = feature_set_from_json(parse_required(features_json, "features"));
    const std::int64_t dim = pow_int(fs.alphabet, fs.r + 1);
    SupportFace face = SupportFace::full(dim);
    if (face_json != nullptr) {
      face = face_from_json(json::parse(face_json));
      if (static_cast<std::int64_t>(face.mask.size()) != dim)
        throw std::invalid_argument("invalid field: mask");
    }
    SolverConfig cfg;
    bool oracle = false;
    double resolution = 1e-3;
    if (config_json != nullptr) {
      const json jc = json::parse(config_json);
      cfg = config_from_json(jc);
      oracle = jc.value("oracle", false);
      resolution = jc.value("oracle_resolution", resolution);
    }
    const ConstraintSystem system = build_constraint_system(fs, face);
    const SolveResult res = maximize(system, cfg, fs);
    json out = solve_result_to_json(res);
    if (oracle) {
      const BlockLaw ref = brute_force_maximizer(system, resolution);
      out["oracle"] = {{"value_nats", entropy_rate(ref).value_nats},
                       {"u", ref.probs()}};
    }
    return out.dump();
  });
}

fib_status fib_closed_form(const char* request_json, char** result_json) {
  return guarded(result_json, [&]() {
    const json req = parse_required(request_json, "request");
    const std::string kind = req.at("kind").get<std::string>();
    json out;
    if (kind == "iid") {
      const BlockLaw u = iid_maximizer(req.at("pi").get<std::vector<double>>());
      out = {{"u_star", block_law_to_json(u)}, {"value_nats", entropy_rate(u).value_nats}};
    } else if (kind == "markov_extension") {
      const json& jm = req.at("mu");
      RBlockLaw mu{jm.at("alphabet").get<int>(), jm.at("r").get<int>(),
                   jm.at("probs").get<std::vector<double>>()};
      const BlockLaw u = markov_extension(mu, NullContextRow::Uniform, req.value("tol", 1e-10),
                                          req.value("reproject", false));
      out = {{"u_star", block_law_to_json(u)},
             {"value_nats", entropy_rate(u).value_nats},
             {"cmi", conditional_mutual_information(u)}};
    } else if (kind == "binary_fixed_mean") {
      const BinaryFixedMean bf = binary_fixed_mean_maximizer(req.at("m").get<double>());
      out = {{"u_star", block_law_to_json(bf.law)},
             {"value_nats", entropy_rate(bf.law).value_nats},
             {"transition", {{bf.transition[0][0], bf.transition[0][1]},
                             {bf.transition[1][0], bf.transition[1][1]}}}};
    } else {
      throw std::invalid_argument("invalid field: kind");
    }
    return out.dump();
  });
}

fib_status fib_gap(const char* law_json, char** result_json) {
  return guarded(result_json, [&]() {
    const BlockLaw u = block_law_from_json(parse_required(law_json, "law"));
    return json{{"entropy_rate_nats", entropy_rate(u).value_nats},
                {"conditional_mutual_information", conditional_mutual_information(u)},
                {"suffix_conditional_entropy", suffix_conditional_entropy(u)},
                {"stationarity_residual", stationarity_residual(u)}}
        .dump();
  });
}

fib_status fib_geometry(const char* request_json, char** result_json) {
  return guarded(result_json, [&]() {
    const json req = parse_required(request_json, "request");
    const double m = req.at("m").get<double>();
    std::vector<double> deltas = req.value("deltas", std::vector<double>{1e-2, 1e-3});
    const LocalChart chart = binary_fixed_mean_chart(m);
    const Eigen::MatrixXd ds = selector_jacobian(chart);
    const EnvelopeReport env = envelope_check(chart);
    Eigen::VectorXd fiber(1);
    fiber << 1.0;
    const std::vector<GapExpansionRow> rows =
        gap_quadratic_expansion_check(chart, fiber, deltas);
    json table = json::array();
    for (const GapExpansionRow& row : rows)
      table.push_back({{"delta", row.delta},
                       {"gap", row.gap},
                       {"predicted", row.predicted},
                       {"ratio", row.ratio}});
    const FiberHessian fh = fiber_hessian(chart);
    return json{{"m", m},
                {"selector_jacobian", ds(0, 0)},
                {"curvature", -fh.xi_xi(0, 0)},
                {"envelope", {{"dv", env.dv[0]},
                              {"dv_fd", env.dv_fd[0]},
                              {"d2v", env.d2v(0, 0)},
                              {"d2v_fd", env.d2v_fd(0, 0)},
                              {"first_order_error", env.first_order_error},
                              {"second_order_error", env.second_order_error}}},
                {"gap_expansion", table}}
        .dump();
  });
}

fib_status fib_simulate(const char* request_json, char** result_json) {
  return guarded(result_json, [&]() {
    const json req = parse_required(request_json, "request");
    ConditionalKernel kernel;
    ContextMarginal eta;
    if (req.contains("kernel")) {
      kernel = kernel_from_json(req.at("kernel"));
      if (!req.contains("eta")) throw std::invalid_argument("missing field: eta");
      eta = ContextMarginal{kernel.alphabet, kernel.r,
                            req.at("eta").get<std::vector<double>>()};
    } else {
      const BlockLaw u = block_law_from_json(req.at("law"));
      kernel = kernel_of(u);
      eta = context_marginal(u);
      if (req.contains("eta")) eta.masses = req.at("eta").get<std::vector<double>>();
    }
    if (static_cast<std::int64_t>(eta.masses.size()) != pow_int(kernel.alphabet, kernel.r))
      throw std::invalid_argument("invalid field: eta");
    const std::int64_t n = req.at("n").get<std::int64_t>();
    const std::uint64_t seed = req.value("seed", 0ULL);
    const RandomMapping mapping = build_random_mapping(kernel);

    SamplePath path;
    std::vector<int> hidden;
    if (req.contains("hidden")) {
      const json& jh = req.at("hidden");
      HiddenAction action{jh.at("thetas").get<std::vector<double>>()};
      HiddenProcess process;
      process.weights = jh.at("weights").get<std::vector<double>>();
      if (action.thetas.size() != process.weights.size())
        throw std::invalid_argument("invalid field: hidden");
      HiddenSimResult sim = simulate_with_hidden_action(mapping, eta, action, process, n, seed);
      path = std::move(sim.visible);
      hidden = std::move(sim.hidden);
    } else {
      path = simulate(mapping, eta, n, seed);
    }
    json out{{"header", sample_path_header(path)}, {"path", sample_path_text(path)}};
    if (!hidden.empty()) out["hidden"] = hidden;
    return out.dump();
  });
}

fib_status fib_estimate(const char* request_json, char** result_json) {
  return guarded(result_json, [&]() {
    const json req = parse_required(request_json, "request");
    const int alphabet = req.at("alphabet").get<int>();
    const int r = req.at("r").get<int>();
    const SamplePath path = sample_path_from_text(req.at("path").get<std::string>(), r);
    const EmpiricalEstimate est = empirical_block_law(path, alphabet, r);
    json out{{"n", est.n}, {"u_hat", est.probs()}};
    if (req.contains("features")) {
      FeatureSet fs = feature_set_from_json(req.at("features"));
      out["b_hat"] = empirical_targets(est, fs);
      if (req.contains("reference")) {
        const std::vector<double> reference = req.at("reference").get<std::vector<double>>();
        const double radius = req.value("radius", 0.2);
        SolverConfig cfg;
        if (req.contains("config")) cfg = config_from_json(req.at("config"));
        const SolveResult res =
            empirical_maximizer(path, fs, SupportFace::full(pow_int(alphabet, r + 1)),
                                reference, radius, cfg);
        out["solve"] = solve_result_to_json(res);
      }
    }
    return out.dump();
  });
}

fib_status fib_experiment(const char* request_json, char** result_json) {
  return guarded(result_json, [&]() {
    const json req = parse_required(request_json, "request");
    ExperimentSpec spec;
    spec.true_kernel = kernel_from_json(req.at("kernel"));
    spec.eta = ContextMarginal{spec.true_kernel.alphabet, spec.true_kernel.r,
                               req.at("eta").get<std::vector<double>>()};
    spec.features = feature_set_from_json(req.at("features"));
    spec.u_star = req.at("u_star").get<std::vector<double>>();
    spec.neighborhood_radius = req.value("radius", 0.2);
    spec.n_grid = req.at("n_grid").get<std::vector<std::int64_t>>();
    spec.seeds = req.at("seeds").get<std::vector<std::uint64_t>>();
    if (req.contains("config")) spec.solver = config_from_json(req.at("config"));
    const ExperimentReport rep = consistency_experiment(spec);
    json out = experiment_report_to_json(rep);
    out["csv"] = experiment_report_csv(rep);
    return out.dump();
  });
}

fib_status fib_alias_demo(const char* request_json, char** result_json) {
  return guarded(result_json, [&]() {
    const json req = parse_required(request_json, "request");
    const double m = req.at("m").get<double>();
    const double q_star = canonical_q_star(m);
    const auto [a_star, b_star] = fixed_mean_family(m, q_star);

    // Solver cross-check on the fixed-mean class.
    FeatureSet fs;
    fs.alphabet = 2;
    fs.r = 1;
    fs.features = {Feature{"mean", {0.0, 1.0, 0.0, 1.0}}};
    fs.targets = {m};
    const ConstraintSystem system = build_constraint_system(fs, SupportFace::full(4));
    const SolveResult res = maximize(system, SolverConfig{}, fs);
    const double q_solver = res.u_star ? (*res.u_star)(0, 1) : 0.0;

    const FiberNonconstancyReport fiber = fiber_nonconstancy_demo(m);

    json out{{"m", m},
             {"q_star", q_star},
             {"a_star", a_star},
             {"b_star", b_star},
             {"value_nats", visible_entropy_h(m, q_star)},
             {"solver_q", q_solver},
             {"solver_gap", std::abs(q_solver - q_star)},
             {"hidden", {{"entropy_half", fiber.entropy_half},
                         {"entropy_quarter", fiber.entropy_quarter},
                         {"difference", fiber.difference},
                         {"visible_kernel_gap", fiber.visible_kernel_gap}}}};
    const int points = req.value("plot_points", 0);
    if (points > 1) {
      json curve = json::array();
      const double hi = std::min(m, 1.0 - m);
      for (int i = 1; i < points; ++i) {
        const double q = hi * i / points;
        curve.push_back({{"q", q}, {"h", visible_entropy_h(m, q)}});
      }
      out["curve"] = curve;
    }
    return out.dump();
  });
}

}  // extern "C"
