#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "aqnn/bounds.hpp"
#include "aqnn/harness.hpp"

namespace aqnn {

nlohmann::json to_json(const BoundsOutput& out);
nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const ExperimentReport& report);
nlohmann::json to_json(const HypothesisTestReport& report);
nlohmann::json to_json(const CoverageResult& result);

/// Parses an experiment config written by to_json(ExperimentConfig) or by hand.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// One row per cell, header first.
void write_cells_csv(const ExperimentReport& report, std::ostream& out);

}  // namespace aqnn
