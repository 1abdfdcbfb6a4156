#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "cirsim/harness.hpp"
#include "cirsim/model.hpp"

namespace cirsim::io {

using json = nlohmann::json;

// Throws IoError when unreadable, ConfigError on malformed JSON.
json load_json_file(const std::filesystem::path& path);

// Model JSON: {"one_factor": {...}} or {"two_factor": {...}}, with
//   delta:   {"constant": v} | {"power_law": {"mu": m}} | {"table": [{"t","v"},...]}
//   jump:    {"linear": {"theta": t}} | {"custom": {"x": [...], "g": [[...],...]}}
//   measure: {"atoms": [{"u","w"},...]} | {"no_jumps": true}
//   history: [{"t","x"},...] covering [-tau, 0]
std::variant<OneFactorModel, TwoFactorModel> parse_model(const json& j);
OneFactorModel parse_one_factor(const json& j);
TwoFactorModel parse_two_factor(const json& j);

// Full experiment config: {"model": ..., "grid": {"h","horizon"}, "paths",
// "seed", "tolerance", optional "mu" (required for table-driven delta),
// "checkpoints", "oscillation_tolerance", "policy" ("absolute"|"truncation"),
// "output", "allow_invalid", "dump_paths"}.
ExperimentConfig parse_config(const json& j);

// Canonical echo of the resolved config (sorted keys via nlohmann, shortest
// round-trip floats); excludes output location and dump flags so the hash
// identifies the experiment, not where its artifacts land.
json canonical_config_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);
std::string format_double(double v);  // shortest round-trip decimal

json report_to_json(const RunResult& result);
json manifest_to_json(const RunManifest& manifest);

std::string report_csv(const ConvergenceReport& report);
std::string moments_csv(const MomentDiagnostics& moments);
std::string path_csv(const SimulatedPath& p);
std::string jump_log_csv(const std::vector<JumpRecord>& jumps);

void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace cirsim::io
