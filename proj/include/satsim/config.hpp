#pragma once

#include "satsim/scenario.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace satsim::config {

/// Parses a scenario document (JSON, comments allowed). Missing keys keep
/// their defaults; unknown keys are rejected with their key path. Relative
/// table paths resolve against `base_dir`. Tables are not loaded.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads, parses, loads the scheme tables and validates.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Full document with every field spelled out; parse_config(serialize_config(c))
/// reproduces c (tables excluded).
std::string serialize_config(const ScenarioConfig& cfg);

/// Scenario template with the satellite values left as "REQUIRED".
std::string required_template();

} // namespace satsim::config
