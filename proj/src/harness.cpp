#include "cirsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "cirsim/io.hpp"
#include "cirsim/version.hpp"

namespace cirsim {

namespace fs = std::filesystem;

int resolve_worker_count(const RunOptions& opt, std::uint64_t paths) {
  long long w = 0;
  if (opt.workers) {
    w = *opt.workers;
  } else if (const char* env = std::getenv(kWorkersEnvVar)) {
    w = std::atoll(env);
  }
  if (w <= 0) w = static_cast<long long>(std::thread::hardware_concurrency());
  if (w <= 0) w = 1;
  return static_cast<int>(std::min(w, static_cast<long long>(std::max<std::uint64_t>(paths, 1))));
}

ValidationReport validate_config_model(const ExperimentConfig& cfg) {
  if (cfg.is_two_factor()) return validate_two_factor(std::get<TwoFactorModel>(cfg.model));
  return validate_one_factor(std::get<OneFactorModel>(cfg.model));
}

namespace {

std::string path_dump_name(std::uint64_t stream, const char* suffix) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "path_%06llu%s.csv",
                static_cast<unsigned long long>(stream), suffix);
  return buf;
}

void dump_path(const fs::path& dir, const SimulatedPath& p) {
  io::write_file(dir / path_dump_name(p.stream_id, ""), io::path_csv(p));
  if (p.two_factor) {
    io::write_file(dir / path_dump_name(p.stream_id, "_jumps_x"), io::jump_log_csv(p.jumps_x));
    io::write_file(dir / path_dump_name(p.stream_id, "_jumps_y"), io::jump_log_csv(p.jumps_y));
  } else {
    io::write_file(dir / path_dump_name(p.stream_id, "_jumps"), io::jump_log_csv(p.jumps_x));
  }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& base_cfg, const RunOptions& opt) {
  ExperimentConfig cfg = base_cfg;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.dump_paths) cfg.dump_paths = *opt.dump_paths;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;

  std::visit([](const auto& m) { require_well_formed(m); }, cfg.model);
  const ValidationReport validation = validate_config_model(cfg);
  if (!validation.passed() && !cfg.allow_invalid) {
    throw ValidationError("model assumptions failed: " + validation.summary() +
                          " (set allow_invalid to run anyway)");
  }

  const bool two = cfg.is_two_factor();
  const double limit = two ? analytic_limit_two_factor(std::get<TwoFactorModel>(cfg.model))
                           : analytic_limit_one_factor(std::get<OneFactorModel>(cfg.model));

  const int workers = resolve_worker_count(opt, cfg.paths);
  std::vector<WorkerRange> ranges;
  {
    const std::uint64_t per = cfg.paths / static_cast<std::uint64_t>(workers);
    const std::uint64_t rem = cfg.paths % static_cast<std::uint64_t>(workers);
    std::uint64_t at = 0;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t count = per + (static_cast<std::uint64_t>(w) < rem ? 1 : 0);
      if (count == 0) continue;
      ranges.push_back({w, at, count});
      at += count;
    }
  }

  fs::path outdir, staging;
  if (opt.write_outputs) {
    if (cfg.output_dir.empty()) {
      throw ConfigError("output directory required to write artifacts");
    }
    outdir = cfg.output_dir;
    staging = cfg.output_dir + ".staging";
    std::error_code ec;
    fs::remove_all(staging, ec);
    try {
      fs::create_directories(staging);
      if (cfg.dump_paths) fs::create_directories(staging / "paths");
    } catch (const fs::filesystem_error& e) {
      throw IoError(e.what());
    }
  }

  const auto started = std::chrono::steady_clock::now();
  std::vector<PathSummary> summaries(cfg.paths);
  std::vector<std::string> worker_errors(ranges.size());

  auto work = [&](std::size_t ri) {
    const WorkerRange& range = ranges[ri];
    for (std::uint64_t s = range.first_stream; s < range.first_stream + range.count; ++s) {
      try {
        const RandomStream rng(cfg.seed, s);
        const SimulatedPath p = std::visit(
            [&](const auto& m) { return simulate_path(m, cfg.grid, cfg.policy, rng); },
            cfg.model);
        summaries[s] = summarize_path(p, cfg.checkpoints, cfg.mu);
        if (opt.write_outputs && cfg.dump_paths) dump_path(staging / "paths", p);
      } catch (const std::exception& e) {
        worker_errors[ri] = "path stream=" + std::to_string(s) + ": " + e.what();
        return;
      }
    }
  };

  if (ranges.size() == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(ranges.size());
    for (std::size_t ri = 0; ri < ranges.size(); ++ri) pool.emplace_back(work, ri);
    for (std::thread& t : pool) t.join();
  }

  for (const std::string& err : worker_errors) {
    if (err.empty()) continue;
    if (opt.write_outputs) {
      std::error_code ec;
      fs::remove_all(staging, ec);  // no partial outputs
    }
    throw Error(err);
  }

  RunResult result;
  result.report = fold_convergence(summaries, cfg.checkpoints, limit, cfg.tolerance,
                                   cfg.oscillation_tolerance, false);
  if (two) {
    result.x_report = fold_convergence(
        summaries, cfg.checkpoints,
        analytic_limit_two_factor_x(std::get<TwoFactorModel>(cfg.model)), cfg.tolerance,
        std::nullopt, true);
  }
  result.moments = fold_moments(summaries, cfg.checkpoints);

  RunManifest& manifest = result.manifest;
  manifest.config_hash = io::config_hash(cfg);
  manifest.engine_version = kEngineVersion;
  manifest.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest.worker_ranges = ranges;
  manifest.converged = result.report.converged;
  manifest.oscillation_ok = result.report.oscillation_ok;
  manifest.overall = manifest.converged && manifest.oscillation_ok;

  if (opt.write_outputs) {
    try {
      io::write_file(staging / "report.json", io::report_to_json(result).dump(2) + "\n");
      io::write_file(staging / "report.csv", io::report_csv(result.report));
      io::write_file(staging / "moments.csv", io::moments_csv(result.moments));
      io::write_file(staging / "manifest.json", io::manifest_to_json(manifest).dump(2) + "\n");
      std::error_code ec;
      fs::remove_all(outdir, ec);
      fs::rename(staging, outdir);
    } catch (const fs::filesystem_error& e) {
      throw IoError(e.what());
    }
  }
  return result;
}

namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

SweepEntry run_sweep_entry(const std::string& name, const ExperimentConfig& cfg,
                           const std::string& out_root, const RunOptions& opt) {
  SweepEntry entry;
  entry.name = name;
  RunOptions per = opt;
  per.out_dir = out_root + "/" + name;
  try {
    const RunResult r = run_experiment(cfg, per);
    entry.ok = true;
    entry.manifest = r.manifest;
    entry.final_rel_error = r.report.checkpoints.back().rel_error;
  } catch (const std::exception& e) {
    entry.ok = false;
    entry.error = e.what();
  }
  return entry;
}

void write_summary(const std::string& out_root, const std::vector<SweepEntry>& entries) {
  std::string csv = "name,status,converged,oscillation_ok,final_rel_error,error\n";
  for (const SweepEntry& e : entries) {
    csv += e.name + ',';
    csv += e.ok ? "ok" : "error";
    csv += ',';
    csv += e.ok ? (e.manifest.converged ? "true" : "false") : "";
    csv += ',';
    csv += e.ok ? (e.manifest.oscillation_ok ? "true" : "false") : "";
    csv += ',';
    if (e.ok) csv += io::format_double(e.final_rel_error);
    csv += ',';
    if (!e.error.empty()) csv += csv_quote(e.error);
    csv += '\n';
  }
  io::write_file(fs::path(out_root) / "summary.csv", csv);
}

}  // namespace

std::vector<SweepEntry> sweep(const std::vector<std::pair<std::string, ExperimentConfig>>& cfgs,
                              const std::string& out_root, const RunOptions& opt) {
  try {
    fs::create_directories(out_root);
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  }
  std::vector<SweepEntry> entries;
  entries.reserve(cfgs.size());
  for (const auto& [name, cfg] : cfgs) {
    entries.push_back(run_sweep_entry(name, cfg, out_root, opt));
  }
  write_summary(out_root, entries);
  return entries;
}

std::vector<SweepEntry> sweep_files(const std::vector<std::filesystem::path>& configs,
                                    const std::string& out_root, const RunOptions& opt) {
  try {
    fs::create_directories(out_root);
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  }
  std::vector<SweepEntry> entries;
  entries.reserve(configs.size());
  for (const fs::path& file : configs) {
    const std::string name = file.stem().string();
    try {
      const ExperimentConfig cfg = io::parse_config(io::load_json_file(file));
      entries.push_back(run_sweep_entry(name, cfg, out_root, opt));
    } catch (const std::exception& e) {
      SweepEntry entry;
      entry.name = name;
      entry.ok = false;
      entry.error = e.what();
      entries.push_back(entry);
    }
  }
  write_summary(out_root, entries);
  return entries;
}

}  // namespace cirsim
