// Command-line front end: validate / limits / simulate / converge / sweep.
// Human-readable tables go to standard output; machine-readable artifacts are
// written by the harness. Exit codes: 0 pass, 1 semantic failure (assumption
// or convergence verdict), 2 usage/parse/IO error.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "cirsim/harness.hpp"
#include "cirsim/io.hpp"
#include "cirsim/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cirsim;

// format_double gives the shortest round-trip decimal ("1"); keep a trailing
// ".0" on integral values so numbers always read as reals.
std::string num(double v) {
  std::string s = io::format_double(v);
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

// Table cells: six significant digits keep the columns aligned; the JSON and
// CSV artifacts carry full precision.
std::string num6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  std::string s = buf;
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

const char* status_str(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    default: return "UNKNOWN";
  }
}

// validate/limits accept either a full experiment config or a bare model
// document ({"one_factor": ...} / {"two_factor": ...}).
std::variant<OneFactorModel, TwoFactorModel> load_model(const std::string& path) {
  const io::json j = io::load_json_file(path);
  return io::parse_model(j.contains("model") ? j["model"] : j);
}

struct RunFlags {
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool dump_paths = false;
};

RunOptions to_options(const RunFlags& f, bool write_outputs) {
  RunOptions opt;
  opt.workers = f.workers;
  opt.seed = f.seed;
  opt.out_dir = f.out;
  if (f.dump_paths) opt.dump_paths = true;
  opt.write_outputs = write_outputs;
  return opt;
}

int cmd_validate(const std::string& config_path) {
  const auto model = load_model(config_path);
  const ValidationReport report =
      std::visit([](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, OneFactorModel>) {
          return validate_one_factor(m);
        } else {
          return validate_two_factor(m);
        }
      }, model);
  for (const ValidationCheck& c : report.checks) {
    std::printf("%-6s %-8s %s\n", c.id.c_str(), status_str(c.status), c.detail.c_str());
  }
  std::printf("overall: %s\n", report.passed() ? "PASS" : "FAIL");
  return report.passed() ? 0 : 1;
}

int cmd_limits(const std::string& config_path) {
  const auto model = load_model(config_path);
  const DeltaProcess& delta = std::visit([](const auto& m) -> const DeltaProcess& {
    return m.delta;
  }, model);
  const auto mu = delta.known_mu();
  const auto nu = delta.known_nu();
  if (!mu || !nu) {
    std::fprintf(stderr, "nu unknown for table-driven delta\n");
    return 1;
  }
  std::printf("mu = %s\n", num(*mu).c_str());
  std::printf("nu = %s\n", num(*nu).c_str());
  if (const auto* one = std::get_if<OneFactorModel>(&model)) {
    std::printf("limit_X = %s\n", num(analytic_limit_one_factor(*one)).c_str());
  } else {
    const auto& two = std::get<TwoFactorModel>(model);
    std::printf("limit_X = %s\n", num(analytic_limit_two_factor_x(two)).c_str());
    std::printf("limit_Y = %s\n", num(analytic_limit_two_factor(two)).c_str());
  }
  return 0;
}

void print_checkpoint_table(const char* title, const ConvergenceReport& r) {
  std::printf("%s\n", title);
  std::printf("%14s %16s %14s %14s %14s %14s\n", "t", "mean", "std_error", "limit",
              "abs_error", "rel_error");
  for (const CheckpointStat& c : r.checkpoints) {
    std::printf("%14s %16s %14s %14s %14s %14s\n", num6(c.t).c_str(), num6(c.mean).c_str(),
                num6(c.std_error).c_str(), num6(c.limit).c_str(), num6(c.abs_error).c_str(),
                num6(c.rel_error).c_str());
  }
}

void print_verdict(const RunResult& r) {
  const ConvergenceReport& rep = r.report;
  std::printf("limit = %s, tolerance = %s\n", num(rep.limit).c_str(),
              num(rep.tolerance).c_str());
  std::printf("converged: %s\n", rep.converged ? "yes" : "no");
  if (rep.oscillation_tolerance) {
    std::printf("max path oscillation = %s (tolerance %s: %s)\n",
                num6(rep.max_path_oscillation).c_str(),
                num(*rep.oscillation_tolerance).c_str(), rep.oscillation_ok ? "ok" : "FAIL");
  } else {
    std::printf("max path oscillation = %s\n", num6(rep.max_path_oscillation).c_str());
  }
  std::printf("overall: %s\n", r.manifest.overall ? "PASS" : "FAIL");
}

int cmd_converge(const std::string& config_path, const RunFlags& flags) {
  ExperimentConfig cfg = io::parse_config(io::load_json_file(config_path));
  // Artifacts are written when a destination exists; the table alone needs none.
  const bool write = flags.out.has_value() || !cfg.output_dir.empty();
  const RunResult result = run_experiment(cfg, to_options(flags, write));
  if (result.x_report) {
    print_checkpoint_table("return of X (t^-mu * integral of X):", *result.x_report);
    print_checkpoint_table("return of Y (t^-mu * integral of Y):", result.report);
  } else {
    print_checkpoint_table("long-term return (t^-mu * integral of X):", result.report);
  }
  print_verdict(result);
  return result.manifest.overall ? 0 : 1;
}

int cmd_simulate(const std::string& config_path, const RunFlags& flags) {
  ExperimentConfig cfg = io::parse_config(io::load_json_file(config_path));
  const RunResult result = run_experiment(cfg, to_options(flags, true));
  const RunManifest& m = result.manifest;
  std::uint64_t paths = 0;
  for (const WorkerRange& r : m.worker_ranges) paths += r.count;
  std::printf("simulated %llu paths over %llu steps (h = %s, horizon = %s)\n",
              static_cast<unsigned long long>(paths),
              static_cast<unsigned long long>(cfg.grid.steps), num(cfg.grid.h).c_str(),
              num(cfg.grid.horizon).c_str());
  std::printf("workers = %zu, config hash = %s\n", m.worker_ranges.size(),
              m.config_hash.c_str());
  const std::string outdir = flags.out ? *flags.out : cfg.output_dir;
  std::printf("artifacts in %s\n", outdir.c_str());
  const CheckpointStat& last = result.report.checkpoints.back();
  std::printf("final R(t=%s) mean = %s, limit = %s, rel_error = %s\n", num6(last.t).c_str(),
              num6(last.mean).c_str(), num6(last.limit).c_str(), num6(last.rel_error).c_str());
  print_verdict(result);
  return m.overall ? 0 : 1;
}

int cmd_sweep(const std::string& dir, const std::string& out_root, const RunFlags& flags) {
  std::vector<fs::path> files;
  try {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  }
  if (files.empty()) throw IoError("no .json configs in " + dir);
  std::sort(files.begin(), files.end());

  const std::vector<SweepEntry> entries = sweep_files(files, out_root, to_options(flags, true));
  bool all_ok = true;
  for (const SweepEntry& e : entries) {
    if (e.ok) {
      std::printf("%s: converged=%s oscillation=%s\n", e.name.c_str(),
                  e.manifest.converged ? "yes" : "no", e.manifest.oscillation_ok ? "yes" : "no");
      all_ok = all_ok && e.manifest.overall;
    } else {
      std::printf("%s: error %s\n", e.name.c_str(), e.error.c_str());
      all_ok = false;
    }
  }
  std::printf("summary: %s\n", (fs::path(out_root) / "summary.csv").string().c_str());
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo engine for jump-diffusion short-rate models with delay"};
  app.set_version_flag("--version", kEngineVersion);
  app.require_subcommand(1);

  std::string config_path, sweep_dir, sweep_out;
  RunFlags flags;

  CLI::App* validate = app.add_subcommand("validate", "check model assumptions");
  validate->add_option("config", config_path, "model or experiment config (JSON)")->required();

  CLI::App* limits = app.add_subcommand("limits", "print analytic long-term limits");
  limits->add_option("config", config_path, "model or experiment config (JSON)")->required();

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    cmd->add_option("--workers", flags.workers, "worker thread count");
    cmd->add_option("--seed", flags.seed, "override the config's base seed");
    cmd->add_option("--out", flags.out, "output directory (overrides config)");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "simulate paths and write artifacts");
  add_run_flags(simulate);
  simulate->add_flag("--dump-paths", flags.dump_paths, "write per-path CSV dumps");

  CLI::App* converge = app.add_subcommand("converge", "run experiment, print checkpoint table");
  add_run_flags(converge);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run every config in a directory");
  sweep_cmd->add_option("dir", sweep_dir, "directory of *.json configs")->required();
  sweep_cmd->add_option("--out", sweep_out, "output root for per-run artifacts")->required();
  sweep_cmd->add_option("--workers", flags.workers, "worker thread count");
  sweep_cmd->add_option("--seed", flags.seed, "override every config's base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(config_path);
    if (limits->parsed()) return cmd_limits(config_path);
    if (simulate->parsed()) return cmd_simulate(config_path, flags);
    if (converge->parsed()) return cmd_converge(config_path, flags);
    return cmd_sweep(sweep_dir, sweep_out, flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
