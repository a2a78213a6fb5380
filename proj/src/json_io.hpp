#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "constraints.hpp"
#include "empirical.hpp"
#include "realization.hpp"
#include "solver.hpp"
#include "types.hpp"

namespace fiberent {

// Wire formats. Doubles round-trip exactly (shortest representation that
// parses back to the same value).

nlohmann::json block_law_to_json(const BlockLaw& u);
BlockLaw block_law_from_json(const nlohmann::json& j, double tol = 1e-9);

nlohmann::json feature_set_to_json(const FeatureSet& fs);
FeatureSet feature_set_from_json(const nlohmann::json& j);

nlohmann::json face_to_json(const SupportFace& face);
SupportFace face_from_json(const nlohmann::json& j);

nlohmann::json solve_result_to_json(const SolveResult& res);

nlohmann::json sample_path_header(const SamplePath& path);
std::string sample_path_text(const SamplePath& path);  // digits, no separator
SamplePath sample_path_from_text(const std::string& text, int r);

nlohmann::json experiment_report_to_json(const ExperimentReport& rep);
std::string experiment_report_csv(const ExperimentReport& rep);

}  // namespace fiberent
