#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cirsim/model.hpp"
#include "cirsim/scheme.hpp"

namespace cirsim {

struct CheckpointStat {
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double limit = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;  // abs_error / max(1, |limit|)
};

struct ConvergenceReport {
  std::vector<CheckpointStat> checkpoints;
  double limit = 0.0;
  double tolerance = 0.0;
  bool converged = false;  // final checkpoint: |mean - limit| <= tol * max(1, |limit|)

  // Per-path proxy for pathwise convergence: largest range of R(t) over the
  // final window [T/10, T] across paths, normalized by max(1, |limit|).
  double max_path_oscillation = 0.0;
  std::optional<double> oscillation_tolerance;
  bool oscillation_ok = true;  // true when untested or within tolerance
};

struct MomentCheckpoint {
  double t = 0.0;
  double mean_x = 0.0, se_x = 0.0;
  double mean_x2 = 0.0, se_x2 = 0.0;
  double mean_x4 = 0.0, se_x4 = 0.0;
};

struct MomentDiagnostics {
  std::vector<MomentCheckpoint> checkpoints;
};

// R(t) = integral_of_path(p, t) / t^mu for the path's return component.
// Requires t > 0 and on the grid.
double long_term_return(const SimulatedPath& p, double t, double mu);
// Same for the X component of a two-factor path.
double long_term_return_x(const SimulatedPath& p, double t, double mu);

// t^{-mu} int_0^t delta(s) ds; the delta integral is exact (closed form or
// trapezoid on a piecewise-linear table), so this is quadrature-error free.
double delta_limit_estimate(const DeltaProcess& d, double t, double mu);

// Per-path reduction inputs. The harness computes these inside workers so a
// path can be dropped from memory immediately; the whole-ensemble report
// functions build the same summaries and fold them in stream order, which
// keeps both entry points bit-identical.
struct PathSummary {
  std::uint64_t stream_id = 0;
  std::vector<double> returns;     // R at each checkpoint (return component)
  std::vector<double> returns_x;   // X-component R (two-factor paths only)
  std::vector<double> x_at;        // X value at each checkpoint
  double oscillation_range = 0.0;  // max - min of R over the final window
  double min_value = 0.0;          // smallest grid value over all components
  std::uint64_t negative_values = 0;
  std::uint64_t total_values = 0;
};

PathSummary summarize_path(const SimulatedPath& p, const std::vector<double>& checkpoints,
                           double mu);

// Folds run over summaries in vector order (stream id order in the harness);
// the reduction order is part of the reproducibility contract.
ConvergenceReport fold_convergence(const std::vector<PathSummary>& summaries,
                                   const std::vector<double>& checkpoints, double limit,
                                   double tol, std::optional<double> oscillation_tol,
                                   bool use_x_component);
MomentDiagnostics fold_moments(const std::vector<PathSummary>& summaries,
                               const std::vector<double>& checkpoints);

ConvergenceReport convergence_report_one_factor(const std::vector<SimulatedPath>& paths,
                                                const OneFactorModel& m, double mu,
                                                const std::vector<double>& checkpoints,
                                                double tol);
ConvergenceReport convergence_report_two_factor(const std::vector<SimulatedPath>& paths,
                                                const TwoFactorModel& m, double mu,
                                                const std::vector<double>& checkpoints,
                                                double tol);
MomentDiagnostics moment_diagnostics(const std::vector<SimulatedPath>& paths,
                                     const std::vector<double>& checkpoints);

// E[X(t)] oracle: the jump and diffusion terms are mean-zero (compensated
// measure, Ito integral), so the mean solves m'(t) = 2*beta*m(t) + delta(t),
// m(0) = xi(0). Closed form for constant delta; stable composite
// Gauss-Legendre on the decaying convolution for power-law delta; per-segment
// closed form for tables. Independent of the stepping scheme.
double mean_ode_oracle(const OneFactorModel& m, double t);

// n-point Gauss-Legendre rule on [-1, 1] (Newton on the Legendre recurrence);
// exposed for quadrature tests.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Geometric defaults {T/16, T/8, T/4, T/2, T} snapped to the grid, deduplicated.
std::vector<double> default_checkpoints(const GridSpec& grid);

}  // namespace cirsim
