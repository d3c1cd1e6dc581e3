#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ppdcpp/simharness.hpp"

namespace ppdcpp::io {

using ordered_json = nlohmann::ordered_json;

ordered_json scenario_to_json(const sim::ScenarioSpec& spec);

// Parses one scenario object. Violations are reported with their JSON path
// (e.g. "$.calibration.tau").
sim::ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::string& path_prefix);

// A scenario file holds either a single scenario object or
// {"scenarios": [...]}. A "methods" array is accepted as shorthand for one
// copy of the scenario per method.
std::vector<sim::ScenarioSpec> scenarios_from_file(const std::string& path);

ordered_json metrics_to_json(const sim::MetricsReport& report);

// One row per sweep point: the grid value, borrowing metrics, and the
// per-parameter estimation metrics.
void write_metrics_csv(const std::string& path, const sim::MetricsReport& report);

}  // namespace ppdcpp::io
