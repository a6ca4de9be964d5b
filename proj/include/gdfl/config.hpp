#pragma once

#include <map>
#include <string>

#include "gdfl/types.hpp"

namespace gdfl {

/// Loads and fully validates a scenario JSON file (schema in docs/scenario.md).
/// Defaults: no GPU, no early stopping, modeled clock, learning rate 0.05.
/// Errors: Parse (malformed JSON), Schema (missing/mistyped field, with field
/// path), Validation (invariant violation, with field path).
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& json_text);

/// Canonical serialization: fixed key order, floats at 17 significant digits.
/// parse(scenario_to_json(c)) == c, and the scenario fingerprint hashes this
/// exact string.
std::string scenario_to_json(const ScenarioConfig& config);

/// The "nodes" array alone, same canonical rendering.
std::string nodes_to_json(const std::vector<NodeProfile>& nodes);

/// Hex FNV-1a 64 over the canonical scenario JSON (seed included).
std::string scenario_fingerprint(const ScenarioConfig& config);

/// CSV registry with header
/// node_id,pue,tdp_watts,gpu_power_watts,util_train,util_agg,region,grid_ci,
/// renewable_ratio,medium,compute_speed,agg_speed (gpu_power_watts may be
/// empty). Ids must be dense and unique.
std::map<NodeId, NodeProfile> load_profile_registry(const std::string& path);

}  // namespace gdfl
