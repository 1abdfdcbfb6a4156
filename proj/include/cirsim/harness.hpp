#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cirsim/estimators.hpp"
#include "cirsim/model.hpp"
#include "cirsim/scheme.hpp"

namespace cirsim {

// Worker-count default comes from this environment variable; a CLI flag
// overrides it, hardware concurrency is the fallback.
inline constexpr const char* kWorkersEnvVar = "CIRSIM_WORKERS";

// Fully resolved experiment: defaults (mu from the delta catalog, geometric
// checkpoints, sign policy) are applied at parse time so two configs that
// resolve identically hash identically.
struct ExperimentConfig {
  std::variant<OneFactorModel, TwoFactorModel> model;
  GridSpec grid;
  std::uint64_t paths = 1;
  std::uint64_t seed = 0;
  double mu = 1.0;
  std::vector<double> checkpoints;
  double tolerance = 0.05;
  std::optional<double> oscillation_tolerance;  // gates the verdict when set
  SignPolicy policy = SignPolicy::AbsoluteValue;
  std::string output_dir;  // empty: caller must supply one to write artifacts
  bool allow_invalid = false;
  bool dump_paths = false;

  bool is_two_factor() const { return std::holds_alternative<TwoFactorModel>(model); }
};

struct WorkerRange {
  int worker = 0;
  std::uint64_t first_stream = 0;
  std::uint64_t count = 0;
};

struct RunManifest {
  std::string config_hash;
  std::string engine_version;
  double wall_time_seconds = 0.0;  // only place timing appears in artifacts
  std::vector<WorkerRange> worker_ranges;
  bool converged = false;
  bool oscillation_ok = true;
  bool overall = false;
};

struct RunResult {
  ConvergenceReport report;
  // Two-factor runs also certify the X component against its one-factor limit.
  std::optional<ConvergenceReport> x_report;
  MomentDiagnostics moments;
  RunManifest manifest;
};

// Call-site overrides (CLI flags); absent fields defer to the config.
struct RunOptions {
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<bool> dump_paths;
  bool write_outputs = true;
};

int resolve_worker_count(const RunOptions& opt, std::uint64_t paths);

ValidationReport validate_config_model(const ExperimentConfig& cfg);

// Simulates cfg.paths paths over stream ids 0..paths-1, folds summaries in
// stream order, and (when writing) stages artifacts in <out>.staging before a
// single rename, so failed runs leave no partial output directory. Artifacts:
// manifest.json, report.json, report.csv, moments.csv, optional paths/ dumps.
// report.json carries no timing and is byte-identical across reruns and
// worker counts for a fixed resolved config.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct SweepEntry {
  std::string name;
  bool ok = false;         // run completed (verdict may still be false)
  std::string error;       // populated when !ok
  RunManifest manifest;    // valid when ok
  double final_rel_error = 0.0;
};

// Runs each (name, config) into <out_root>/<name>/ and writes
// <out_root>/summary.csv; per-run failures are recorded, not fatal.
std::vector<SweepEntry> sweep(const std::vector<std::pair<std::string, ExperimentConfig>>& cfgs,
                              const std::string& out_root, const RunOptions& opt = {});

// Same, but loads each config file first; parse failures become recorded
// entries named after the file stem instead of aborting the sweep.
std::vector<SweepEntry> sweep_files(const std::vector<std::filesystem::path>& configs,
                                    const std::string& out_root, const RunOptions& opt = {});

}  // namespace cirsim
