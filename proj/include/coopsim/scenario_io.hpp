#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "coopsim/model.hpp"

namespace coopsim {

/// Raised for malformed scenario documents.
class ScenarioFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a scenario file cannot be opened.
class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Serializes a scenario. Cluster indices are written 1-based, as are all
/// human-facing node numbers; everything else maps field for field.
nlohmann::json to_json(const ScenarioConfig& config);

/// Parses a scenario document. Every field is required except
/// `mpr.noise` and `mpr.fading_param`, which fall back to
/// kDefaultNoiseWatts and kDefaultFadingParam.
ScenarioConfig scenario_from_json(const nlohmann::json& doc);

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace coopsim
