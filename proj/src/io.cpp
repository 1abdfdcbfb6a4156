#include "cirsim/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace cirsim::io {

namespace {

const json& need(const json& j, const char* key, const char* ctx) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError(std::string(ctx) + ": missing field '" + key + "'");
  }
  return *it;
}

double as_number(const json& v, const char* key, const char* ctx) {
  if (!v.is_number()) {
    throw ConfigError(std::string(ctx) + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

double need_number(const json& j, const char* key, const char* ctx) {
  return as_number(need(j, key, ctx), key, ctx);
}

std::uint64_t need_uint(const json& j, const char* key, const char* ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(std::string(ctx) + ": field '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& j, const char* key, bool fallback, const char* ctx) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) {
    throw ConfigError(std::string(ctx) + ": field '" + key + "' must be a boolean");
  }
  return it->get<bool>();
}

std::vector<Knot> parse_knots(const json& arr, const char* value_key, const char* ctx) {
  if (!arr.is_array() || arr.empty()) {
    throw ConfigError(std::string(ctx) + ": expected a nonempty array");
  }
  std::vector<Knot> out;
  out.reserve(arr.size());
  for (const json& e : arr) {
    out.push_back({need_number(e, "t", ctx), need_number(e, value_key, ctx)});
  }
  return out;
}

DeltaProcess parse_delta(const json& j, const char* ctx) {
  if (j.contains("constant")) {
    return DeltaProcess::constant(as_number(j["constant"], "constant", ctx));
  }
  if (j.contains("power_law")) {
    return DeltaProcess::power_law(need_number(j["power_law"], "mu", ctx));
  }
  if (j.contains("table")) {
    return DeltaProcess::table(parse_knots(j["table"], "v", ctx));
  }
  throw ConfigError(std::string(ctx) + ": delta must be one of constant/power_law/table");
}

JumpMeasure parse_measure(const json& j, const char* ctx) {
  if (j.contains("no_jumps")) {
    if (!j["no_jumps"].is_boolean() || !j["no_jumps"].get<bool>()) {
      throw ConfigError(std::string(ctx) + ": no_jumps must be true when present");
    }
    return JumpMeasure::no_jumps();
  }
  const json& atoms = need(j, "atoms", ctx);
  if (!atoms.is_array() || atoms.empty()) {
    throw ConfigError(std::string(ctx) + ": atoms must be a nonempty array");
  }
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const json& a : atoms) {
    out.push_back({need_number(a, "u", ctx), need_number(a, "w", ctx)});
  }
  return JumpMeasure::from_atoms(std::move(out));
}

JumpCoefficient parse_jump(const json& j, const char* ctx) {
  if (j.contains("linear")) {
    return JumpCoefficient::linear_in_state(need_number(j["linear"], "theta", ctx));
  }
  if (j.contains("custom")) {
    const json& c = j["custom"];
    const json& xs = need(c, "x", ctx);
    const json& g = need(c, "g", ctx);
    if (!xs.is_array() || !g.is_array()) {
      throw ConfigError(std::string(ctx) + ": custom jump needs arrays 'x' and 'g'");
    }
    std::vector<double> grid;
    for (const json& v : xs) grid.push_back(as_number(v, "x", ctx));
    std::vector<std::vector<double>> rows;
    for (const json& row : g) {
      if (!row.is_array()) throw ConfigError(std::string(ctx) + ": 'g' must be rows of numbers");
      std::vector<double> r;
      for (const json& v : row) r.push_back(as_number(v, "g", ctx));
      rows.push_back(std::move(r));
    }
    return JumpCoefficient::custom(std::move(grid), std::move(rows));
  }
  throw ConfigError(std::string(ctx) + ": jump must be one of linear/custom");
}

HistorySegment parse_history(const json& j, double tau, const char* ctx) {
  return HistorySegment::from_points(parse_knots(j, "x", ctx), tau);
}

json knots_to_json(const std::vector<Knot>& ks, const char* value_key) {
  json arr = json::array();
  for (const Knot& k : ks) arr.push_back({{"t", k.t}, {value_key, k.v}});
  return arr;
}

json delta_to_json(const DeltaProcess& d) {
  switch (d.kind()) {
    case DeltaProcess::Kind::Constant: return {{"constant", d.constant_value()}};
    case DeltaProcess::Kind::PowerLaw: return {{"power_law", {{"mu", d.power()}}}};
    case DeltaProcess::Kind::TableDriven: return {{"table", knots_to_json(d.knots(), "v")}};
  }
  return {};
}

json measure_to_json(const JumpMeasure& m) {
  if (m.is_no_jumps()) return {{"no_jumps", true}};
  json atoms = json::array();
  for (const Atom& a : m.atoms()) atoms.push_back({{"u", a.u}, {"w", a.w}});
  return {{"atoms", atoms}};
}

json jump_to_json(const JumpCoefficient& jc) {
  if (jc.kind() == JumpCoefficient::Kind::LinearInState) {
    return {{"linear", {{"theta", jc.theta()}}}};
  }
  return {{"custom", {{"x", jc.x_grid()}, {"g", jc.values()}}}};
}

json model_to_json(const std::variant<OneFactorModel, TwoFactorModel>& model) {
  if (const auto* one = std::get_if<OneFactorModel>(&model)) {
    return {{"one_factor",
             {{"beta", one->beta},
              {"sigma", one->sigma},
              {"gamma", one->gamma},
              {"tau", one->tau},
              {"delta", delta_to_json(one->delta)},
              {"jump", jump_to_json(one->jump)},
              {"measure", measure_to_json(one->measure)},
              {"history", knots_to_json(one->history.points(), "x")}}}};
  }
  const auto& two = std::get<TwoFactorModel>(model);
  return {{"two_factor",
           {{"beta1", two.beta1},
            {"sigma1", two.sigma1},
            {"gamma1", two.gamma1},
            {"theta1", two.theta1},
            {"measure1", measure_to_json(two.measure1)},
            {"beta2", two.beta2},
            {"sigma2", two.sigma2},
            {"gamma2", two.gamma2},
            {"theta2", two.theta2},
            {"measure2", measure_to_json(two.measure2)},
            {"tau", two.tau},
            {"delta", delta_to_json(two.delta)},
            {"history_x", knots_to_json(two.history_x.points(), "x")},
            {"history_y", knots_to_json(two.history_y.points(), "x")}}}};
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

OneFactorModel parse_one_factor(const json& j) {
  const char* ctx = "one_factor";
  OneFactorModel m;
  m.beta = need_number(j, "beta", ctx);
  m.sigma = need_number(j, "sigma", ctx);
  m.gamma = need_number(j, "gamma", ctx);
  m.tau = need_number(j, "tau", ctx);
  m.delta = parse_delta(need(j, "delta", ctx), ctx);
  m.jump = parse_jump(need(j, "jump", ctx), ctx);
  m.measure = parse_measure(need(j, "measure", ctx), ctx);
  m.history = parse_history(need(j, "history", ctx), m.tau, ctx);
  require_well_formed(m);
  return m;
}

TwoFactorModel parse_two_factor(const json& j) {
  const char* ctx = "two_factor";
  TwoFactorModel m;
  m.beta1 = need_number(j, "beta1", ctx);
  m.sigma1 = need_number(j, "sigma1", ctx);
  m.gamma1 = need_number(j, "gamma1", ctx);
  m.theta1 = need_number(j, "theta1", ctx);
  m.measure1 = parse_measure(need(j, "measure1", ctx), ctx);
  m.beta2 = need_number(j, "beta2", ctx);
  m.sigma2 = need_number(j, "sigma2", ctx);
  m.gamma2 = need_number(j, "gamma2", ctx);
  m.theta2 = need_number(j, "theta2", ctx);
  m.measure2 = parse_measure(need(j, "measure2", ctx), ctx);
  m.tau = need_number(j, "tau", ctx);
  m.delta = parse_delta(need(j, "delta", ctx), ctx);
  m.history_x = parse_history(need(j, "history_x", ctx), m.tau, ctx);
  m.history_y = parse_history(need(j, "history_y", ctx), m.tau, ctx);
  require_well_formed(m);
  return m;
}

std::variant<OneFactorModel, TwoFactorModel> parse_model(const json& j) {
  const bool one = j.contains("one_factor");
  const bool two = j.contains("two_factor");
  if (one == two) {
    throw ConfigError("model: exactly one of 'one_factor' or 'two_factor' required");
  }
  if (one) return parse_one_factor(j["one_factor"]);
  return parse_two_factor(j["two_factor"]);
}

ExperimentConfig parse_config(const json& j) {
  const char* ctx = "config";
  ExperimentConfig cfg;
  cfg.model = parse_model(need(j, "model", ctx));

  const json& grid = need(j, "grid", ctx);
  cfg.grid = GridSpec::create(need_number(grid, "h", "grid"), need_number(grid, "horizon", "grid"));

  cfg.paths = need_uint(j, "paths", ctx);
  if (cfg.paths < 1) throw ConfigError("config: paths must be >= 1");
  cfg.seed = j.contains("seed") ? need_uint(j, "seed", ctx) : 0;

  const DeltaProcess& delta = cfg.is_two_factor()
                                  ? std::get<TwoFactorModel>(cfg.model).delta
                                  : std::get<OneFactorModel>(cfg.model).delta;
  if (j.contains("mu")) {
    cfg.mu = need_number(j, "mu", ctx);
    if (!(cfg.mu >= 1.0)) throw ConfigError("config: mu must be >= 1");
    if (auto known = delta.known_mu(); known && std::fabs(*known - cfg.mu) > 1e-12) {
      throw ConfigError("config: mu conflicts with the delta catalog value");
    }
  } else if (auto known = delta.known_mu()) {
    cfg.mu = *known;
  } else {
    throw ConfigError("config: mu is required for a table-driven delta");
  }

  if (j.contains("checkpoints")) {
    const json& arr = j["checkpoints"];
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError("config: checkpoints must be a nonempty array");
    }
    for (const json& v : arr) {
      const double t = as_number(v, "checkpoints", ctx);
      if (!(t > 0.0)) throw ConfigError("config: checkpoints must be > 0");
      std::size_t k;
      try {
        k = grid_index(cfg.grid, t);
      } catch (const OffGridQuery&) {
        throw ConfigError("config: checkpoint t = " + std::to_string(t) + " is not on the grid");
      }
      const double snapped = cfg.grid.time(k);
      if (!cfg.checkpoints.empty() && snapped <= cfg.checkpoints.back()) {
        throw ConfigError("config: checkpoints must be strictly increasing");
      }
      cfg.checkpoints.push_back(snapped);
    }
  } else {
    cfg.checkpoints = default_checkpoints(cfg.grid);
  }

  if (j.contains("tolerance")) {
    cfg.tolerance = need_number(j, "tolerance", ctx);
    if (!(cfg.tolerance > 0.0)) throw ConfigError("config: tolerance must be > 0");
  }
  if (j.contains("oscillation_tolerance")) {
    const double v = need_number(j, "oscillation_tolerance", ctx);
    if (!(v > 0.0)) throw ConfigError("config: oscillation_tolerance must be > 0");
    cfg.oscillation_tolerance = v;
  }

  if (j.contains("policy")) {
    const json& p = j["policy"];
    if (p == "truncation") {
      cfg.policy = SignPolicy::Truncation;
    } else if (p == "absolute") {
      cfg.policy = SignPolicy::AbsoluteValue;
    } else {
      throw ConfigError("config: policy must be 'absolute' or 'truncation'");
    }
  }

  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("config: output must be a string");
    cfg.output_dir = j["output"].get<std::string>();
  }
  cfg.allow_invalid = get_bool(j, "allow_invalid", false, ctx);
  cfg.dump_paths = get_bool(j, "dump_paths", false, ctx);
  return cfg;
}

json canonical_config_json(const ExperimentConfig& cfg) {
  json c;
  c["model"] = model_to_json(cfg.model);
  c["grid"] = {{"h", cfg.grid.h}, {"horizon", cfg.grid.horizon}};
  c["paths"] = cfg.paths;
  c["seed"] = cfg.seed;
  c["mu"] = cfg.mu;
  c["checkpoints"] = cfg.checkpoints;
  c["tolerance"] = cfg.tolerance;
  if (cfg.oscillation_tolerance) c["oscillation_tolerance"] = *cfg.oscillation_tolerance;
  c["policy"] = cfg.policy == SignPolicy::Truncation ? "truncation" : "absolute";
  c["allow_invalid"] = cfg.allow_invalid;
  return c;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config_json(cfg).dump())));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

json checkpoints_to_json(const ConvergenceReport& r) {
  json arr = json::array();
  for (const CheckpointStat& c : r.checkpoints) {
    arr.push_back({{"t", c.t},
                   {"mean", c.mean},
                   {"std_error", c.std_error},
                   {"limit", c.limit},
                   {"abs_error", c.abs_error},
                   {"rel_error", c.rel_error}});
  }
  return arr;
}

}  // namespace

json report_to_json(const RunResult& result) {
  const ConvergenceReport& r = result.report;
  json out;
  out["config_hash"] = result.manifest.config_hash;
  out["limit"] = r.limit;
  out["tolerance"] = r.tolerance;
  out["converged"] = r.converged;
  out["max_path_oscillation"] = r.max_path_oscillation;
  if (r.oscillation_tolerance) out["oscillation_tolerance"] = *r.oscillation_tolerance;
  out["oscillation_ok"] = r.oscillation_ok;
  out["checkpoints"] = checkpoints_to_json(r);
  if (result.x_report) {
    out["x_limit"] = result.x_report->limit;
    out["x_checkpoints"] = checkpoints_to_json(*result.x_report);
  }
  json moments = json::array();
  for (const MomentCheckpoint& m : result.moments.checkpoints) {
    moments.push_back({{"t", m.t},
                       {"mean_x", m.mean_x},
                       {"se_x", m.se_x},
                       {"mean_x2", m.mean_x2},
                       {"se_x2", m.se_x2},
                       {"mean_x4", m.mean_x4},
                       {"se_x4", m.se_x4}});
  }
  out["moments"] = moments;
  return out;
}

json manifest_to_json(const RunManifest& manifest) {
  json workers = json::array();
  for (const WorkerRange& r : manifest.worker_ranges) {
    workers.push_back({{"worker", r.worker}, {"first_stream", r.first_stream}, {"count", r.count}});
  }
  return {{"config_hash", manifest.config_hash},
          {"engine_version", manifest.engine_version},
          {"wall_time_seconds", manifest.wall_time_seconds},
          {"workers", workers},
          {"verdict",
           {{"converged", manifest.converged},
            {"oscillation_ok", manifest.oscillation_ok},
            {"overall", manifest.overall}}}};
}

std::string report_csv(const ConvergenceReport& report) {
  std::string out = "t,mean,std_error,limit,abs_error,rel_error\n";
  for (const CheckpointStat& c : report.checkpoints) {
    out += format_double(c.t) + ',' + format_double(c.mean) + ',' + format_double(c.std_error) +
           ',' + format_double(c.limit) + ',' + format_double(c.abs_error) + ',' +
           format_double(c.rel_error) + '\n';
  }
  return out;
}

std::string moments_csv(const MomentDiagnostics& moments) {
  std::string out = "t,mean_x,se_x,mean_x2,se_x2,mean_x4,se_x4\n";
  for (const MomentCheckpoint& m : moments.checkpoints) {
    out += format_double(m.t) + ',' + format_double(m.mean_x) + ',' + format_double(m.se_x) + ',' +
           format_double(m.mean_x2) + ',' + format_double(m.se_x2) + ',' +
           format_double(m.mean_x4) + ',' + format_double(m.se_x4) + '\n';
  }
  return out;
}

std::string path_csv(const SimulatedPath& p) {
  std::string out = p.two_factor ? "time,x,y,integral\n" : "time,x,integral\n";
  const std::vector<double>& integral = p.two_factor ? p.integral_y : p.integral_x;
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    out += format_double(p.times[k]) + ',' + format_double(p.x[k]);
    if (p.two_factor) out += ',' + format_double(p.y[k]);
    out += ',' + format_double(integral[k]) + '\n';
  }
  return out;
}

std::string jump_log_csv(const std::vector<JumpRecord>& jumps) {
  std::string out = "time,mark,increment\n";
  for (const JumpRecord& j : jumps) {
    out += format_double(j.time) + ',' + format_double(j.mark) + ',' + format_double(j.increment) +
           '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace cirsim::io
