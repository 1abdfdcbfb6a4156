#pragma once

#include <cstdint>
#include <vector>

#include "cirsim/drivers.hpp"
#include "cirsim/model.hpp"

namespace cirsim {

// How the scheme keeps the state usable by sqrt/pow when a step overshoots
// below zero. Truncation projects to max(x, 0) after each full step;
// AbsoluteValue keeps the raw value and relies on |x| inside the diffusion,
// allowing transient negatives.
enum class SignPolicy { Truncation, AbsoluteValue };

struct GridSpec {
  double h = 0.0;
  double horizon = 0.0;
  std::size_t steps = 0;

  // Throws ConfigError unless horizon is an integer number of steps of size h
  // (within 1e-9 relative).
  static GridSpec create(double h, double horizon);

  double time(std::size_t n) const { return static_cast<double>(n) * h; }
};

// Grid steps spanned by the delay tau; 0 when tau == 0. ConfigError unless
// tau is an integer multiple of h with tau >= h, so delayed lookups inside the
// simulated segment land exactly on grid points.
std::size_t delay_steps(const GridSpec& grid, double tau);

// Index k with t = k*h within 1e-9 relative; OffGridQuery otherwise.
std::size_t grid_index(const GridSpec& grid, double t);

struct JumpRecord {
  double time = 0.0;
  double mark = 0.0;
  double increment = 0.0;  // applied jump size g(pre-jump state, mark)
};

struct SimulatedPath {
  GridSpec grid;
  std::vector<double> times;
  std::vector<double> x;
  std::vector<double> y;           // empty for one-factor paths
  std::vector<double> integral_x;  // left-rule running integral of X
  std::vector<double> integral_y;  // left-rule running integral of Y
  std::vector<JumpRecord> jumps_x;
  std::vector<JumpRecord> jumps_y;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  SignPolicy policy = SignPolicy::AbsoluteValue;
  bool two_factor = false;
};

// In-flight Euler state of one factor. One step computes
//
//   X_{n+1} = P[ X_n + (2 beta X_n + forcing - c(X_n)) h
//                + sigma |X(t_n - tau)|^gamma sqrt(|X_n|) dW_n
//                + sum_{jumps in (t_n, t_{n+1}]} g(pre-jump state, u) ]
//
// with drift, diffusion factors and compensator c frozen at the left endpoint.
// Jump events arrive at exact exponential times within the step and apply
// sequentially, each increment evaluated on the state including earlier
// in-step jumps; the sign-policy projection P runs once per full step.
// `forcing` is delta(t_n) for a one-factor X and X_n for the second factor.
// Delayed lookups resolve to simulated grid values once n >= tau/h and to the
// interpolated history segment before that; gamma == 0 short-circuits the
// delayed factor to exactly 1, making paths independent of tau and history.
class FactorState {
 public:
  FactorState(double beta, double sigma, double gamma, std::size_t delay,
              const HistorySegment& history, const JumpCoefficient& jump,
              const JumpMeasure& measure, SignPolicy policy, double h,
              RandomStream brownian, RandomStream jumps);

  double value() const { return values_.back(); }
  std::size_t step_index() const { return values_.size() - 1; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double> take_values() { return std::move(values_); }
  std::vector<JumpRecord> take_jump_log() { return std::move(jump_log_); }

  void reserve(std::size_t n) { values_.reserve(n); }
  void step(double forcing);

 private:
  double delayed_value() const;

  double beta_, sigma_, gamma_;
  std::size_t delay_;
  HistorySegment history_;  // owned copies keep the state movable
  JumpCoefficient jump_;
  JumpMeasure measure_;
  SignPolicy policy_;
  double h_;
  RandomStream brownian_;
  RandomStream jumps_;
  std::vector<double> values_;
  std::vector<JumpRecord> jump_log_;
};

// Standalone state builders; simulate_path drives the same objects.
// The base stream supplies (seed, stream id); each factor forks its Brownian
// and jump substreams from it.
FactorState make_one_factor_state(const OneFactorModel& m, const GridSpec& grid,
                                  SignPolicy policy, const RandomStream& base);
void step_one_factor(FactorState& s, const OneFactorModel& m, const GridSpec& grid);

struct TwoFactorState {
  FactorState x;
  FactorState y;
};
TwoFactorState make_two_factor_state(const TwoFactorModel& m, const GridSpec& grid,
                                     SignPolicy policy, const RandomStream& base);
void step_two_factor(TwoFactorState& s, const TwoFactorModel& m, const GridSpec& grid);

// Full path over [0, horizon]; running integrals use the left-endpoint rule
// I_{n+1} = I_n + X_n * h. The delay buffer seeds from the history segment.
SimulatedPath simulate_path(const OneFactorModel& m, const GridSpec& grid,
                            SignPolicy policy, const RandomStream& rng);
SimulatedPath simulate_path(const TwoFactorModel& m, const GridSpec& grid,
                            SignPolicy policy, const RandomStream& rng);

// Running integral of the path's return component (X for one-factor paths,
// Y for two-factor paths) at grid time t; OffGridQuery off the grid.
double integral_of_path(const SimulatedPath& p, double t);
// Running integral of X regardless of model kind.
double integral_of_x(const SimulatedPath& p, double t);

}  // namespace cirsim
