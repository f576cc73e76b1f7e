#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "eqins/sim_harness.hpp"

namespace eqins {

nlohmann::json config_to_json(const SimConfig& cfg);
SimConfig config_from_json(const nlohmann::json& j);

// Throws IoError when the file cannot be read, std::invalid_argument on a
// malformed document.
SimConfig load_config(const std::filesystem::path& path);
void save_config(const SimConfig& cfg, const std::filesystem::path& path);

// Applies a dotted-path override, e.g. "gains.c=8.0" or "integrator=rk4".
// The path must reference an existing key (array elements by index); the
// value is parsed as JSON where possible and falls back to a string.
// Throws std::invalid_argument naming the offending key.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace eqins
