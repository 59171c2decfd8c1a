#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "nun/config.hpp"

// JSON form of RunConfig. Top-level sections are core, degrade, derun,
// sodun, bui and metrics; every section and key is optional (defaults fill
// the gaps) but unknown keys are rejected.
namespace nun::config_io {

nlohmann::json to_json(const DegradationSpec& spec);
DegradationSpec spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& cfg);
RunConfig from_json(const nlohmann::json& j);

RunConfig load(const std::filesystem::path& path);
std::string dump(const RunConfig& cfg);

}  // namespace nun::config_io
