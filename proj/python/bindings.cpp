// Python module over the C++ core. Structured inputs travel as JSON text so
// the bindings reuse the same parser and serializer as the CLI; the package
// __init__ wraps these in dict-based helpers.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cirsim/drivers.hpp"
#include "cirsim/estimators.hpp"
#include "cirsim/harness.hpp"
#include "cirsim/io.hpp"
#include "cirsim/version.hpp"

namespace py = pybind11;

namespace {

using namespace cirsim;
using io::json;

JumpMeasure measure_from(const std::vector<std::pair<double, double>>& atoms) {
  std::vector<Atom> a;
  a.reserve(atoms.size());
  for (const auto& [u, w] : atoms) a.push_back({u, w});
  return JumpMeasure::from_atoms(std::move(a));
}

std::variant<OneFactorModel, TwoFactorModel> model_from(const std::string& text) {
  const json j = json::parse(text);
  return io::parse_model(j.contains("model") ? j["model"] : j);
}

SignPolicy policy_from(const std::string& name) {
  if (name == "absolute") return SignPolicy::AbsoluteValue;
  if (name == "truncation") return SignPolicy::Truncation;
  throw ConfigError("policy must be 'absolute' or 'truncation', got '" + name + "'");
}

std::string validate_json(const std::string& model_text) {
  const auto model = model_from(model_text);
  const ValidationReport report = std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, OneFactorModel>) {
          return validate_one_factor(m);
        } else {
          return validate_two_factor(m);
        }
      },
      model);
  json checks = json::array();
  for (const ValidationCheck& c : report.checks) {
    const char* status = c.status == CheckStatus::Pass   ? "pass"
                         : c.status == CheckStatus::Fail ? "fail"
                                                         : "unverifiable";
    checks.push_back({{"id", c.id}, {"status", status}, {"detail", c.detail}});
  }
  return json{{"passed", report.passed()}, {"checks", checks}}.dump();
}

std::string limits_json(const std::string& model_text) {
  const auto model = model_from(model_text);
  json out;
  if (const auto* one = std::get_if<OneFactorModel>(&model)) {
    out["mu"] = one->delta.known_mu().value_or(0.0);
    out["nu"] = one->delta.known_nu().value_or(0.0);
    out["limit_x"] = analytic_limit_one_factor(*one);
  } else {
    const auto& two = std::get<TwoFactorModel>(model);
    out["mu"] = two.delta.known_mu().value_or(0.0);
    out["nu"] = two.delta.known_nu().value_or(0.0);
    out["limit_x"] = analytic_limit_two_factor_x(two);
    out["limit_y"] = analytic_limit_two_factor(two);
  }
  return out.dump();
}

double oracle(const std::string& model_text, double t) {
  const auto model = model_from(model_text);
  const auto* one = std::get_if<OneFactorModel>(&model);
  if (!one) throw ConfigError("mean oracle is defined for one-factor models");
  return mean_ode_oracle(*one, t);
}

py::dict simulate_one(const std::string& model_text, double h, double horizon,
                      std::uint64_t seed, std::uint64_t stream, const std::string& policy) {
  const auto model = model_from(model_text);
  const GridSpec grid = GridSpec::create(h, horizon);
  const RandomStream rng(seed, stream);
  const SignPolicy sp = policy_from(policy);
  const SimulatedPath p = std::visit(
      [&](const auto& m) { return simulate_path(m, grid, sp, rng); }, model);
  py::dict out;
  out["times"] = p.times;
  out["x"] = p.x;
  out["integral_x"] = p.integral_x;
  if (p.two_factor) {
    out["y"] = p.y;
    out["integral_y"] = p.integral_y;
  }
  return out;
}

std::string run_json(const std::string& config_text, std::optional<int> workers,
                     std::optional<std::string> out_dir) {
  const ExperimentConfig cfg = io::parse_config(json::parse(config_text));
  RunOptions opt;
  opt.workers = workers;
  opt.out_dir = std::move(out_dir);
  opt.write_outputs = opt.out_dir.has_value() || !cfg.output_dir.empty();
  const RunResult result = run_experiment(cfg, opt);
  return json{{"report", io::report_to_json(result)},
              {"manifest", io::manifest_to_json(result.manifest)}}
      .dump();
}

std::vector<std::uint64_t> raw_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub,
                                   std::size_t n) {
  RandomStream rng(seed, stream, sub);
  std::vector<std::uint64_t> out(n);
  for (std::uint64_t& v : out) v = rng.next_u64();
  return out;
}

std::vector<double> raw_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub,
                                std::size_t n) {
  RandomStream rng(seed, stream, sub);
  std::vector<double> out(n);
  for (double& v : out) v = rng.uniform01();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monte Carlo engine for jump-diffusion short-rate models with delay";
  m.attr("__version__") = kEngineVersion;

  py::register_exception<Error>(m, "EngineError");
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UnknownNu>(m, "UnknownNuError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("philox4x64", &RandomStream::philox4x64, py::arg("counter"), py::arg("key"),
        "One raw Philox 4x64-10 block.");
  m.def("raw_u64", &raw_u64, py::arg("seed"), py::arg("stream"), py::arg("substream"),
        py::arg("n"), "First n 64-bit words of a stream.");
  m.def("raw_uniform", &raw_uniform, py::arg("seed"), py::arg("stream"), py::arg("substream"),
        py::arg("n"), "First n uniform (0,1) draws of a stream.");
  m.def("normal_inverse_cdf", &normal_inverse_cdf, py::arg("p"));

  m.def(
      "gamma_functional",
      [](double theta1, const std::vector<std::pair<double, double>>& atoms) {
        return gamma_functional(theta1, measure_from(atoms));
      },
      py::arg("theta1"), py::arg("atoms"),
      "theta1^2 * sum w_i u_i^2 (6 + 4 theta1 u_i + theta1^2 u_i^2)");
  m.def(
      "m_functional",
      [](double theta1, const std::vector<std::pair<double, double>>& atoms) {
        return m_functional(theta1, measure_from(atoms));
      },
      py::arg("theta1"), py::arg("atoms"), "theta1^2 * second moment of the measure");

  m.def("validate_json", &validate_json, py::arg("model_json"));
  m.def("limits_json", &limits_json, py::arg("model_json"));
  m.def("mean_ode_oracle", &oracle, py::arg("model_json"), py::arg("t"));
  m.def("simulate_one", &simulate_one, py::arg("model_json"), py::arg("h"), py::arg("horizon"),
        py::arg("seed") = 0, py::arg("stream") = 0, py::arg("policy") = "absolute");
  m.def("run_json", &run_json, py::arg("config_json"), py::arg("workers") = std::nullopt,
        py::arg("out_dir") = std::nullopt);
}
