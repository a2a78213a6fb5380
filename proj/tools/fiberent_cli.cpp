// Command-line front end; talks to the library through the C API only.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fiberent.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file: " + out_path);
  out << text;
}

struct CallResult {
  int exit_code = kExitOk;
  std::string body;
};

// Runs a C API call, translating status codes to the exit-code contract.
template <typename Fn>
CallResult run_call(Fn&& fn) {
  char* result = nullptr;
  const fib_status st = fn(&result);
  CallResult out;
  if (st == FIB_OK) {
    out.body = result ? result : "";
  } else {
    out.exit_code = st == FIB_ERR_INFEASIBLE ? kExitInfeasible : kExitError;
    out.body = fib_last_error();
  }
  fib_string_free(result);
  return out;
}

std::string format_human(const json& j, int indent = 0) {
  std::string pad(indent, ' ');
  std::string out;
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object() || (value.is_array() && !value.empty() && value[0].is_object())) {
        out += pad + key + ":\n" + format_human(value, indent + 2);
      } else {
        out += pad + key + ": " + value.dump() + "\n";
      }
    }
  } else if (j.is_array()) {
    for (const json& item : j) out += format_human(item, indent) + "\n";
  } else {
    out += pad + j.dump() + "\n";
  }
  return out;
}

int finish(const CallResult& res, const std::string& out_path, const std::string& format) {
  if (res.exit_code == kExitError) {
    std::cerr << "error: " << res.body << "\n";
    return kExitError;
  }
  std::string body = res.body;
  int code = res.exit_code;
  if (code == kExitInfeasible) {
    body = json{{"status", "infeasible"}, {"message", res.body}}.dump();
  }
  // Solve-style results carry their status in-band.
  const json parsed = json::parse(body, nullptr, false);
  if (code == kExitOk && !parsed.is_discarded() && parsed.is_object() &&
      parsed.value("status", "") == "infeasible")
    code = kExitInfeasible;
  if (!parsed.is_discarded() && format != "json") {
    if (format == "csv" && parsed.is_object() && parsed.contains("csv")) {
      body = parsed.at("csv").get<std::string>();
    } else if (format == "text") {
      body = format_human(parsed);
    }
  }
  write_output(out_path, body);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-rate maximizing block laws: solve, analyze, simulate"};
  app.require_subcommand(1);

  std::string features_file, face_file, config_file, out_path, format = "json";
  std::uint64_t seed = 0;
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  auto* solve = app.add_subcommand("solve", "Maximize the entropy rate under moment constraints");
  bool oracle = false;
  solve->add_option("--features", features_file, "Feature set JSON file")->required();
  solve->add_option("--face", face_file, "Support face JSON file");
  solve->add_option("--config", config_file, "Solver config JSON file");
  solve->add_option("--seed", seed, "Seed for randomized diagnostics");
  solve->add_flag("--oracle", oracle, "Compare against the grid-search oracle");

  auto* closed = app.add_subcommand("closed-form", "Evaluate a closed-form maximizer");
  std::string request_file;
  closed->add_option("--config", request_file, "Request JSON file")->required();

  auto* gap = app.add_subcommand("gap", "Entropy rate and gap functionals of a block law");
  std::string law_file;
  gap->add_option("--law", law_file, "Block law JSON file")->required();

  auto* geometry = app.add_subcommand("geometry", "Local geometry of the binary fixed-mean chart");
  double geom_m = 0.5;
  geometry->add_option("--mean", geom_m, "Stationary mean m")->required();

  auto* simulate = app.add_subcommand("simulate", "Sample a path from a kernel");
  std::string sim_request;
  simulate->add_option("--config", sim_request, "Simulation request JSON file")->required();
  simulate->add_option("--seed", seed, "Seed override");

  auto* estimate = app.add_subcommand("estimate", "Empirical block law from a path");
  std::string est_request;
  estimate->add_option("--config", est_request, "Estimation request JSON file")->required();

  auto* experiment = app.add_subcommand("experiment", "Simulate/estimate/solve consistency grid");
  std::string exp_request;
  experiment->add_option("--config", exp_request, "Experiment spec JSON file")->required();

  auto* alias = app.add_subcommand("alias-demo", "Aliased hidden-state worked example");
  double alias_m = 0.5;
  bool plot = false;
  alias->add_option("--mean", alias_m, "Stationary mean m")->required();
  alias->add_flag("--plot", plot, "Emit the entropy curve as a table");

  CLI11_PARSE(app, argc, argv);

  try {
    CallResult res;
    if (*solve) {
      const std::string features = read_file(features_file);
      std::string face, config;
      json jc = config_file.empty() ? json::object() : json::parse(read_file(config_file));
      if (seed != 0) jc["seed"] = seed;
      if (oracle) jc["oracle"] = true;
      config = jc.dump();
      if (!face_file.empty()) face = read_file(face_file);
      res = run_call([&](char** out) {
        return fib_solve(features.c_str(), face.empty() ? nullptr : face.c_str(),
                         config.c_str(), out);
      });
    } else if (*closed) {
      const std::string request = read_file(request_file);
      res = run_call([&](char** out) { return fib_closed_form(request.c_str(), out); });
    } else if (*gap) {
      const std::string law = read_file(law_file);
      res = run_call([&](char** out) { return fib_gap(law.c_str(), out); });
    } else if (*geometry) {
      const std::string request = json{{"m", geom_m}}.dump();
      res = run_call([&](char** out) { return fib_geometry(request.c_str(), out); });
    } else if (*simulate) {
      json jr = json::parse(read_file(sim_request));
      if (seed != 0) jr["seed"] = seed;
      const std::string request = jr.dump();
      res = run_call([&](char** out) { return fib_simulate(request.c_str(), out); });
    } else if (*estimate) {
      const std::string request = read_file(est_request);
      res = run_call([&](char** out) { return fib_estimate(request.c_str(), out); });
    } else if (*experiment) {
      const std::string request = read_file(exp_request);
      res = run_call([&](char** out) { return fib_experiment(request.c_str(), out); });
    } else if (*alias) {
      json jr{{"m", alias_m}};
      if (plot) jr["plot_points"] = 200;
      const std::string request = jr.dump();
      res = run_call([&](char** out) { return fib_alias_demo(request.c_str(), out); });
    }
    return finish(res, out_path, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
