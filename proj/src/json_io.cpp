#include "json_io.hpp"

#include <stdexcept>

namespace fiberent {

using nlohmann::json;

nlohmann::json block_law_to_json(const BlockLaw& u) {
  return json{{"alphabet", u.alphabet_size()}, {"r", u.memory()}, {"probs", u.probs()}};
}

BlockLaw block_law_from_json(const json& j, double tol) {
  if (!j.contains("alphabet")) throw std::invalid_argument("missing field: alphabet");
  if (!j.contains("r")) throw std::invalid_argument("missing field: r");
  if (!j.contains("probs")) throw std::invalid_argument("missing field: probs");
  return BlockLaw(j.at("alphabet").get<int>(), j.at("r").get<int>(),
                  j.at("probs").get<std::vector<double>>(), tol);
}

nlohmann::json feature_set_to_json(const FeatureSet& fs) {
  json feats = json::array();
  for (const Feature& f : fs.features) feats.push_back({{"name", f.name}, {"table", f.table}});
  return json{{"alphabet", fs.alphabet}, {"r", fs.r}, {"features", feats}, {"targets", fs.targets}};
}

FeatureSet feature_set_from_json(const json& j) {
  FeatureSet fs;
  if (!j.contains("alphabet")) throw std::invalid_argument("missing field: alphabet");
  if (!j.contains("r")) throw std::invalid_argument("missing field: r");
  fs.alphabet = j.at("alphabet").get<int>();
  fs.r = j.at("r").get<int>();
  if (fs.alphabet < 2) throw std::invalid_argument("invalid field: alphabet");
  if (fs.r < 1) throw std::invalid_argument("invalid field: r");
  const std::size_t dim = static_cast<std::size_t>(pow_int(fs.alphabet, fs.r + 1));
  if (!j.contains("features")) throw std::invalid_argument("missing field: features");
  for (const json& f : j.at("features")) {
    Feature feat;
    feat.name = f.value("name", "");
    if (!f.contains("table")) throw std::invalid_argument("missing field: table");
    feat.table = f.at("table").get<std::vector<double>>();
    if (feat.table.size() != dim) throw std::invalid_argument("invalid field: table");
    fs.features.push_back(std::move(feat));
  }
  if (!j.contains("targets")) throw std::invalid_argument("missing field: targets");
  fs.targets = j.at("targets").get<std::vector<double>>();
  if (fs.targets.size() != fs.features.size())
    throw std::invalid_argument("invalid field: targets");
  return fs;
}

nlohmann::json face_to_json(const SupportFace& face) {
  std::vector<int> mask(face.mask.begin(), face.mask.end());
  return json{{"mask", mask}};
}

SupportFace face_from_json(const json& j) {
  if (!j.contains("mask")) throw std::invalid_argument("missing field: mask");
  const std::vector<int> mask = j.at("mask").get<std::vector<int>>();
  SupportFace face;
  face.mask.assign(mask.begin(), mask.end());
  return face;
}

nlohmann::json solve_result_to_json(const SolveResult& res) {
  json j;
  switch (res.status) {
    case SolveStatus::Converged: j["status"] = "converged"; break;
    case SolveStatus::MaxIters: j["status"] = "max_iters"; break;
    case SolveStatus::Infeasible: j["status"] = "infeasible"; break;
  }
  j["value_nats"] = res.value_nats;
  j["iterations"] = res.iterations;
  j["infeasibility_residual"] = res.infeasibility_residual;
  j["face_shrink"] = res.face_shrink;
  if (res.u_star) j["u_star"] = block_law_to_json(*res.u_star);
  if (res.certificate) {
    j["certificate"] = json{{"lambda", res.certificate->lambda},
                            {"gamma", res.certificate->gamma},
                            {"psi", res.certificate->psi},
                            {"residual", res.certificate->stationarity_residual}};
  }
  return j;
}

nlohmann::json sample_path_header(const SamplePath& path) {
  return json{{"seed", path.seed},
              {"r", path.r},
              {"kernel_id", path.kernel_id},
              {"length", path.symbols.size()}};
}

std::string sample_path_text(const SamplePath& path) {
  std::string out;
  out.reserve(path.symbols.size());
  for (int s : path.symbols) {
    if (s < 0 || s > 9) throw std::invalid_argument("text form requires single-digit symbols");
    out.push_back(static_cast<char>('0' + s));
  }
  return out;
}

SamplePath sample_path_from_text(const std::string& text, int r) {
  SamplePath path;
  path.r = r;
  path.symbols.reserve(text.size());
  for (char ch : text) {
    if (ch == '\n' || ch == '\r' || ch == ' ' || ch == ',') continue;
    if (ch < '0' || ch > '9') throw std::invalid_argument("invalid symbol character");
    path.symbols.push_back(ch - '0');
  }
  return path;
}

nlohmann::json experiment_report_to_json(const ExperimentReport& rep) {
  json cells = json::array();
  for (const ExperimentCell& c : rep.cells) {
    const char* status = c.status == SolveStatus::Converged    ? "converged"
                         : c.status == SolveStatus::MaxIters   ? "max_iters"
                                                               : "infeasible";
    cells.push_back({{"n", c.n},
                     {"seed", c.seed},
                     {"error", c.error},
                     {"value_nats", c.value_nats},
                     {"status", status}});
  }
  return json{{"cells", cells},
              {"n_grid", rep.n_grid},
              {"median_error", rep.median_error},
              {"loglog_slope", rep.loglog_slope}};
}

std::string experiment_report_csv(const ExperimentReport& rep) {
  std::string out = "n,seed,error,value,status\n";
  for (const ExperimentCell& c : rep.cells) {
    const char* status = c.status == SolveStatus::Converged    ? "converged"
                         : c.status == SolveStatus::MaxIters   ? "max_iters"
                                                               : "infeasible";
    out += json(c.n).dump() + "," + json(c.seed).dump() + "," + json(c.error).dump() + "," +
           json(c.value_nats).dump() + "," + status + "\n";
  }
  return out;
}

}  // namespace fiberent
