#include "cirsim/scheme.hpp"

#include <cmath>
#include <utility>

namespace cirsim {

GridSpec GridSpec::create(double h, double horizon) {
  if (!std::isfinite(h) || h <= 0.0) throw ConfigError("grid step h must be finite and > 0");
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw ConfigError("grid horizon must be finite and > 0");
  }
  const auto steps = static_cast<long long>(std::llround(horizon / h));
  if (steps < 1 || std::fabs(static_cast<double>(steps) * h - horizon) >
                       1e-9 * std::max(1.0, horizon)) {
    throw ConfigError("horizon must be an integer multiple of the step h");
  }
  GridSpec g;
  g.h = h;
  g.horizon = horizon;
  g.steps = static_cast<std::size_t>(steps);
  return g;
}

std::size_t delay_steps(const GridSpec& grid, double tau) {
  if (!std::isfinite(tau) || tau < 0.0) throw ConfigError("tau must be finite and >= 0");
  if (tau == 0.0) return 0;
  const auto d = static_cast<long long>(std::llround(tau / grid.h));
  if (d < 1) throw ConfigError("grid step h must not exceed the delay tau");
  if (std::fabs(static_cast<double>(d) * grid.h - tau) > 1e-9 * std::max(1.0, tau)) {
    throw ConfigError("tau must be an integer multiple of the step h");
  }
  return static_cast<std::size_t>(d);
}

std::size_t grid_index(const GridSpec& grid, double t) {
  const auto k = static_cast<long long>(std::llround(t / grid.h));
  if (k < 0 || static_cast<std::size_t>(k) > grid.steps ||
      std::fabs(static_cast<double>(k) * grid.h - t) > 1e-9 * std::max(1.0, std::fabs(t))) {
    throw OffGridQuery("t = " + std::to_string(t) + " is not a grid point");
  }
  return static_cast<std::size_t>(k);
}

FactorState::FactorState(double beta, double sigma, double gamma, std::size_t delay,
                         const HistorySegment& history, const JumpCoefficient& jump,
                         const JumpMeasure& measure, SignPolicy policy, double h,
                         RandomStream brownian, RandomStream jumps)
    : beta_(beta),
      sigma_(sigma),
      gamma_(gamma),
      delay_(delay),
      history_(history),
      jump_(jump),
      measure_(measure),
      policy_(policy),
      h_(h),
      brownian_(brownian),
      jumps_(jumps) {
  values_.push_back(history_.value(0.0));
}

double FactorState::delayed_value() const {
  const std::size_t n = step_index();
  if (delay_ == 0) return values_[n];
  if (n >= delay_) return values_[n - delay_];
  const double t = (static_cast<double>(n) - static_cast<double>(delay_)) * h_;
  return history_.value(t);
}

void FactorState::step(double forcing) {
  const std::size_t n = step_index();
  const double t0 = static_cast<double>(n) * h_;
  const double t1 = static_cast<double>(n + 1) * h_;
  const double x = values_.back();

  const double drift = (2.0 * beta_ * x + forcing - jump_.compensator(x, measure_)) * h_;
  const double delayed_factor =
      gamma_ == 0.0 ? 1.0 : std::pow(std::fabs(delayed_value()), gamma_);
  const double dw = gaussian_increment(brownian_, h_);
  const double diffusion = sigma_ * delayed_factor * std::sqrt(std::fabs(x)) * dw;

  double jump_sum = 0.0;
  if (!measure_.is_no_jumps()) {
    for (const JumpEvent& ev : jump_events_in(jumps_, measure_, t0, t1)) {
      const double inc = jump_.evaluate(x + jump_sum, ev.atom, measure_);
      jump_log_.push_back({ev.time, ev.mark, inc});
      jump_sum += inc;
    }
  }

  double next = x + drift + diffusion + jump_sum;
  if (policy_ == SignPolicy::Truncation && next < 0.0) next = 0.0;
  values_.push_back(next);
}

FactorState make_one_factor_state(const OneFactorModel& m, const GridSpec& grid,
                                  SignPolicy policy, const RandomStream& base) {
  return FactorState(m.beta, m.sigma, m.gamma, delay_steps(grid, m.tau), m.history, m.jump,
                     m.measure, policy, grid.h, base.fork(substream::kBrownianX),
                     base.fork(substream::kJumpsX));
}

void step_one_factor(FactorState& s, const OneFactorModel& m, const GridSpec& grid) {
  s.step(m.delta.value(grid.time(s.step_index())));
}

TwoFactorState make_two_factor_state(const TwoFactorModel& m, const GridSpec& grid,
                                     SignPolicy policy, const RandomStream& base) {
  const std::size_t d = delay_steps(grid, m.tau);
  FactorState x(m.beta1, m.sigma1, m.gamma1, d, m.history_x,
                JumpCoefficient::linear_in_state(m.theta1), m.measure1, policy, grid.h,
                base.fork(substream::kBrownianX), base.fork(substream::kJumpsX));
  FactorState y(m.beta2, m.sigma2, m.gamma2, d, m.history_y,
                JumpCoefficient::linear_in_state(m.theta2), m.measure2, policy, grid.h,
                base.fork(substream::kBrownianY), base.fork(substream::kJumpsY));
  return {std::move(x), std::move(y)};
}

void step_two_factor(TwoFactorState& s, const TwoFactorModel& m, const GridSpec& grid) {
  const double x_left = s.x.value();  // Y's forcing is X at the left endpoint
  s.x.step(m.delta.value(grid.time(s.x.step_index())));
  s.y.step(x_left);
}

namespace {

std::vector<double> left_rule_integral(const std::vector<double>& v, double h) {
  std::vector<double> integral(v.size());
  integral[0] = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) integral[k + 1] = integral[k] + v[k] * h;
  return integral;
}

void fill_times(SimulatedPath& p) {
  p.times.resize(p.grid.steps + 1);
  for (std::size_t k = 0; k <= p.grid.steps; ++k) p.times[k] = p.grid.time(k);
}

}  // namespace

SimulatedPath simulate_path(const OneFactorModel& m, const GridSpec& grid, SignPolicy policy,
                            const RandomStream& rng) {
  FactorState xs = make_one_factor_state(m, grid, policy, rng);
  xs.reserve(grid.steps + 1);
  for (std::size_t k = 0; k < grid.steps; ++k) step_one_factor(xs, m, grid);

  SimulatedPath p;
  p.grid = grid;
  p.seed = rng.seed();
  p.stream_id = rng.stream_id();
  p.policy = policy;
  p.two_factor = false;
  fill_times(p);
  p.jumps_x = xs.take_jump_log();
  p.x = xs.take_values();
  p.integral_x = left_rule_integral(p.x, grid.h);
  return p;
}

SimulatedPath simulate_path(const TwoFactorModel& m, const GridSpec& grid, SignPolicy policy,
                            const RandomStream& rng) {
  TwoFactorState s = make_two_factor_state(m, grid, policy, rng);
  s.x.reserve(grid.steps + 1);
  s.y.reserve(grid.steps + 1);
  for (std::size_t k = 0; k < grid.steps; ++k) step_two_factor(s, m, grid);

  SimulatedPath p;
  p.grid = grid;
  p.seed = rng.seed();
  p.stream_id = rng.stream_id();
  p.policy = policy;
  p.two_factor = true;
  fill_times(p);
  p.jumps_x = s.x.take_jump_log();
  p.jumps_y = s.y.take_jump_log();
  p.x = s.x.take_values();
  p.y = s.y.take_values();
  p.integral_x = left_rule_integral(p.x, grid.h);
  p.integral_y = left_rule_integral(p.y, grid.h);
  return p;
}

double integral_of_path(const SimulatedPath& p, double t) {
  const std::size_t k = grid_index(p.grid, t);
  return p.two_factor ? p.integral_y[k] : p.integral_x[k];
}

double integral_of_x(const SimulatedPath& p, double t) {
  return p.integral_x[grid_index(p.grid, t)];
}

}  // namespace cirsim
