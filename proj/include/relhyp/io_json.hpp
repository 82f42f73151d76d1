#pragma once

#include "relhyp/ct_harness.hpp"
#include "relhyp/electric.hpp"
#include "relhyp/ladder.hpp"
#include "relhyp/metric_graph.hpp"
#include "relhyp/partial_electro.hpp"
#include "relhyp/tree_spaces.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace relhyp {

// All lengths cross the file boundary as exact fraction strings.

MetricGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const MetricGraph& g);

HoroFamily family_from_json(const nlohmann::json& j, const MetricGraph& host);
nlohmann::json family_to_json(const HoroFamily& fam);

std::vector<PETarget> targets_from_json(const nlohmann::json& j);

TreeOfSpaces tos_from_json(const nlohmann::json& j);
nlohmann::json tos_to_json(const TreeOfSpaces& tos);

nlohmann::json ladder_to_json(const Ladder& lad);
nlohmann::json validation_to_json(const ValidationReport& rep);

std::string profile_to_csv(const CTProfile& prof);
nlohmann::json profile_to_json(const CTProfile& prof);

nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace relhyp
