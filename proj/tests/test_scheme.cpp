#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cirsim/scheme.hpp"

using namespace cirsim;

namespace {

HistorySegment flat_history(double level, double tau) {
  if (tau == 0.0) return HistorySegment::from_points({{0.0, level}}, 0.0);
  return HistorySegment::from_points({{-tau, level}, {0.0, level}}, tau);
}

OneFactorModel deterministic_decay() {
  OneFactorModel m;
  m.beta = -0.5;
  m.sigma = 0.0;
  m.gamma = 0.0;
  m.tau = 0.0;
  m.delta = DeltaProcess::constant(0.0);
  m.jump = JumpCoefficient::linear_in_state(0.0);
  m.measure = JumpMeasure::no_jumps();
  m.history = flat_history(1.0, 0.0);
  return m;
}

}  // namespace

TEST_CASE("grid construction and index queries") {
  const auto grid = GridSpec::create(0.25, 1.0);
  CHECK(grid.steps == 4);
  CHECK(grid.time(3) == 0.75);
  CHECK(grid_index(grid, 0.5) == 2);
  CHECK_THROWS_AS(grid_index(grid, 0.3), OffGridQuery);
  CHECK_THROWS_AS(grid_index(grid, 1.25), OffGridQuery);
  CHECK_THROWS_AS(GridSpec::create(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(GridSpec::create(0.3, 1.0), ConfigError);  // 1/0.3 not integral

  CHECK(delay_steps(grid, 0.0) == 0);
  CHECK(delay_steps(grid, 0.5) == 2);
  CHECK_THROWS_AS(delay_steps(grid, 0.1), ConfigError);   // h > tau
  CHECK_THROWS_AS(delay_steps(grid, 0.6), ConfigError);   // not a multiple
  CHECK_THROWS_AS(delay_steps(grid, -1.0), ConfigError);
}

TEST_CASE("deterministic decay follows the exact Euler recursion") {
  const auto grid = GridSpec::create(0.01, 5.0);
  const auto p = simulate_path(deterministic_decay(), grid, SignPolicy::AbsoluteValue,
                               RandomStream(1, 0));
  REQUIRE(p.x.size() == grid.steps + 1);
  double expected = 1.0;
  for (std::size_t n = 0; n <= grid.steps; ++n) {
    CHECK(p.x[n] == doctest::Approx(expected).epsilon(1e-13));
    expected *= 1.0 - 0.01;
  }
  CHECK(p.jumps_x.empty());
  CHECK_FALSE(p.two_factor);
  CHECK(p.seed == 1);
  CHECK(p.stream_id == 0);
}

TEST_CASE("hand recursion at T=1, h=0.25 with forcing") {
  auto m = deterministic_decay();
  m.delta = DeltaProcess::constant(1.0);
  m.history = flat_history(2.0, 0.0);
  const auto grid = GridSpec::create(0.25, 1.0);
  const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(0, 0));
  // X_{n+1} = X_n (1 - 0.25) + 0.25, X_0 = 2
  const double expect[5] = {2.0, 1.75, 1.5625, 1.421875, 1.31640625};
  for (int n = 0; n <= 4; ++n) CHECK(p.x[n] == doctest::Approx(expect[n]).epsilon(1e-15));
  // left rule: 0.25 * (2 + 1.75 + 1.5625 + 1.421875)
  CHECK(integral_of_path(p, 1.0) == doctest::Approx(1.68359375).epsilon(1e-15));
  CHECK(integral_of_path(p, 0.0) == 0.0);
}

TEST_CASE("left-rule integral of a ramp") {
  // beta = 0, delta = 1, X0 = 0 gives X_n = n h exactly
  OneFactorModel m = deterministic_decay();
  m.beta = 0.0;
  m.delta = DeltaProcess::constant(1.0);
  m.history = flat_history(0.0, 0.0);
  const auto grid = GridSpec::create(0.1, 1.0);
  const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(0, 0));
  CHECK(integral_of_path(p, 1.0) == doctest::Approx(0.45).epsilon(1e-14));
  CHECK_THROWS_AS(integral_of_path(p, 0.55), OffGridQuery);
  for (std::size_t k = 0; k + 1 < p.integral_x.size(); ++k) {
    CHECK(p.integral_x[k + 1] >= p.integral_x[k]);  // nondecreasing
  }
}

TEST_CASE("zero state with zero forcing is absorbing") {
  OneFactorModel m;
  m.beta = -0.5;
  m.sigma = 0.3;
  m.gamma = 0.25;
  m.tau = 0.5;
  m.delta = DeltaProcess::constant(0.0);
  m.jump = JumpCoefficient::linear_in_state(0.1);
  m.measure = JumpMeasure::from_atoms({{1.0, 2.0}});
  m.history = flat_history(0.0, 0.5);
  const auto grid = GridSpec::create(0.1, 3.0);
  const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(7, 3));
  for (double v : p.x) CHECK(v == 0.0);
  for (const JumpRecord& j : p.jumps_x) CHECK(j.increment == 0.0);
}

TEST_CASE("jump log replays the path exactly when sigma = 0") {
  OneFactorModel m;
  m.beta = -0.3;
  m.sigma = 0.0;
  m.gamma = 0.0;
  m.tau = 0.0;
  m.delta = DeltaProcess::constant(0.7);
  m.jump = JumpCoefficient::linear_in_state(0.2);
  m.measure = JumpMeasure::from_atoms({{0.5, 2.0}, {-0.5, 1.0}});
  m.history = flat_history(1.0, 0.0);
  const auto grid = GridSpec::create(0.05, 10.0);
  const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(11, 2));

  const double m1 = m.measure.moment(1);  // compensator rate theta * x * m1
  std::size_t j = 0;
  double x = 1.0;
  for (std::size_t n = 0; n < grid.steps; ++n) {
    const double t1 = grid.time(n + 1);
    const double drift = (2.0 * m.beta * x + 0.7 - 0.2 * x * m1) * grid.h;
    double jump_sum = 0.0;
    while (j < p.jumps_x.size() && p.jumps_x[j].time <= t1) {
      const double inc = 0.2 * (x + jump_sum) * p.jumps_x[j].mark;
      CHECK(p.jumps_x[j].increment == doctest::Approx(inc).epsilon(1e-12));
      jump_sum += p.jumps_x[j].increment;
      ++j;
    }
    x = x + drift + jump_sum;
    CHECK(p.x[n + 1] == doctest::Approx(x).epsilon(1e-12));
    x = p.x[n + 1];
  }
  CHECK(j == p.jumps_x.size());  // every logged jump fell inside some step
  REQUIRE(!p.jumps_x.empty());
  for (std::size_t k = 1; k < p.jumps_x.size(); ++k) {
    CHECK(p.jumps_x[k].time > p.jumps_x[k - 1].time);
  }
}

TEST_CASE("a unit-mark jump scales the state by 1 + theta") {
  // sigma = 0, delta = 0, beta = 0: between jumps only the compensator drift
  // acts, and each jump multiplies the pre-jump state by (1 + theta).
  OneFactorModel m;
  m.beta = 0.0;
  m.sigma = 0.0;
  m.gamma = 0.0;
  m.tau = 0.0;
  m.delta = DeltaProcess::constant(0.0);
  m.jump = JumpCoefficient::linear_in_state(0.4);
  m.measure = JumpMeasure::from_atoms({{1.0, 1.0}});
  m.history = flat_history(1.0, 0.0);
  const auto grid = GridSpec::create(0.5, 40.0);
  const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(3, 5));
  REQUIRE(!p.jumps_x.empty());
  std::size_t j = 0;
  for (std::size_t n = 0; n < grid.steps && j < p.jumps_x.size(); ++n) {
    const double t1 = grid.time(n + 1);
    double state = p.x[n];
    while (j < p.jumps_x.size() && p.jumps_x[j].time <= t1) {
      CHECK(p.jumps_x[j].increment == doctest::Approx(0.4 * state).epsilon(1e-12));
      state *= 1.4;
      ++j;
    }
  }
}

TEST_CASE("delayed lookups resolve history then simulated values") {
  OneFactorModel m;
  m.beta = -0.5;
  m.sigma = 0.4;
  m.gamma = 0.25;
  m.tau = 1.0;
  m.delta = DeltaProcess::constant(1.0);
  m.jump = JumpCoefficient::linear_in_state(0.0);
  m.measure = JumpMeasure::no_jumps();
  m.history = HistorySegment::from_points({{-1.0, 4.0}, {0.0, 1.0}}, 1.0);
  const auto grid = GridSpec::create(0.5, 2.0);  // delay = 2 steps
  const std::uint64_t seed = 21, stream = 6;
  const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(seed, stream));

  // Replay with the same public pieces: the Brownian substream of (seed,
  // stream) and the documented step formula. Delayed reads hit the history at
  // n = 0, 1 (t - tau < 0) and simulated values afterwards.
  RandomStream brownian = RandomStream(seed, stream).fork(substream::kBrownianX);
  std::vector<double> xs{1.0};
  for (std::size_t n = 0; n < grid.steps; ++n) {
    const double x = xs.back();
    const double t_delayed = (static_cast<double>(n) - 2.0) * 0.5;
    const double xd = n >= 2 ? xs[n - 2] : m.history.value(t_delayed);
    const double drift = (2.0 * m.beta * x + 1.0) * grid.h;
    const double dw = gaussian_increment(brownian, grid.h);
    const double diffusion = m.sigma * std::pow(std::fabs(xd), 0.25) * std::sqrt(std::fabs(x)) * dw;
    xs.push_back(x + drift + diffusion);
  }
  for (std::size_t n = 0; n <= grid.steps; ++n) CHECK(p.x[n] == xs[n]);
}

TEST_CASE("gamma = 0 makes paths independent of the delay") {
  OneFactorModel base;
  base.beta = -0.5;
  base.sigma = 0.3;
  base.gamma = 0.0;
  base.tau = 0.0;
  base.delta = DeltaProcess::constant(1.0);
  base.jump = JumpCoefficient::linear_in_state(0.1);
  base.measure = JumpMeasure::from_atoms({{1.0, 1.0}});
  base.history = flat_history(1.0, 0.0);

  OneFactorModel delayed = base;
  delayed.tau = 5.0;
  delayed.history = HistorySegment::from_points({{-5.0, 9.0}, {-1.0, 0.25}, {0.0, 1.0}}, 5.0);

  const auto grid = GridSpec::create(0.05, 20.0);
  const auto pa = simulate_path(base, grid, SignPolicy::AbsoluteValue, RandomStream(17, 4));
  const auto pb = simulate_path(delayed, grid, SignPolicy::AbsoluteValue, RandomStream(17, 4));
  REQUIRE(pa.x.size() == pb.x.size());
  for (std::size_t n = 0; n < pa.x.size(); ++n) CHECK(pa.x[n] == pb.x[n]);
}

TEST_CASE("reproducibility is bit-identical for identical inputs") {
  OneFactorModel m;
  m.beta = -0.5;
  m.sigma = 0.3;
  m.gamma = 0.25;
  m.tau = 1.0;
  m.delta = DeltaProcess::constant(1.0);
  m.jump = JumpCoefficient::linear_in_state(0.1);
  m.measure = JumpMeasure::from_atoms({{1.0, 1.0}});
  m.history = flat_history(1.0, 1.0);
  const auto grid = GridSpec::create(0.05, 10.0);
  const auto a = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(8, 15));
  const auto b = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(8, 15));
  REQUIRE(a.x.size() == b.x.size());
  for (std::size_t n = 0; n < a.x.size(); ++n) CHECK(a.x[n] == b.x[n]);
  REQUIRE(a.jumps_x.size() == b.jumps_x.size());
  const auto c = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(8, 16));
  bool differs = false;
  for (std::size_t n = 0; n < a.x.size(); ++n) differs = differs || a.x[n] != c.x[n];
  CHECK(differs);
}

TEST_CASE("truncation policy keeps every value nonnegative") {
  OneFactorModel m;
  m.beta = -0.5;
  m.sigma = 2.5;  // violent diffusion to force overshoots
  m.gamma = 0.3;
  m.tau = 0.5;
  m.delta = DeltaProcess::constant(0.05);
  m.jump = JumpCoefficient::linear_in_state(0.1);
  m.measure = JumpMeasure::from_atoms({{1.0, 1.0}});
  m.history = flat_history(0.2, 0.5);
  const auto grid = GridSpec::create(0.05, 50.0);
  bool saw_negative_raw = false;
  for (std::uint64_t s = 0; s < 16; ++s) {
    const auto t = simulate_path(m, grid, SignPolicy::Truncation, RandomStream(40, s));
    for (double v : t.x) CHECK(v >= 0.0);
    const auto raw = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(40, s));
    for (double v : raw.x) saw_negative_raw = saw_negative_raw || v < 0.0;
  }
  CHECK(saw_negative_raw);  // the raw policy does overshoot for this model
}

TEST_CASE("deterministic error halves when the step halves") {
  OneFactorModel m = deterministic_decay();
  m.delta = DeltaProcess::constant(1.0);
  m.history = flat_history(3.0, 0.0);
  // exact: X(t) = 1 + 2 e^{-t} for beta = -0.5, delta = 1, X0 = 3
  const auto exact = [](double t) { return 1.0 + 2.0 * std::exp(-t); };
  double errors[3];
  const double hs[3] = {0.1, 0.05, 0.025};
  for (int i = 0; i < 3; ++i) {
    const auto grid = GridSpec::create(hs[i], 4.0);
    const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(0, 0));
    double worst = 0.0;
    for (std::size_t n = 0; n <= grid.steps; ++n) {
      worst = std::max(worst, std::fabs(p.x[n] - exact(grid.time(n))));
    }
    errors[i] = worst;
  }
  CHECK(errors[0] / errors[1] > 1.7);
  CHECK(errors[0] / errors[1] < 2.3);
  CHECK(errors[1] / errors[2] > 1.7);
  CHECK(errors[1] / errors[2] < 2.3);
}

TEST_CASE("compensated jumps keep the mean on the exponential decay") {
  OneFactorModel m;
  m.beta = -0.1;
  m.sigma = 0.0;
  m.gamma = 0.0;
  m.tau = 0.0;
  m.delta = DeltaProcess::constant(0.0);
  m.jump = JumpCoefficient::linear_in_state(0.2);
  m.measure = JumpMeasure::from_atoms({{1.0, 0.5}});
  m.history = flat_history(1.0, 0.0);
  const auto grid = GridSpec::create(0.05, 2.0);
  const int paths = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < paths; ++s) {
    const auto p =
        simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(500, static_cast<std::uint64_t>(s)));
    sum += p.x.back();
    sum2 += p.x.back() * p.x.back();
  }
  const double mean = sum / paths;
  const double se = std::sqrt((sum2 / paths - mean * mean) / paths);
  const double target = std::exp(2.0 * m.beta * grid.horizon);  // E[X(T)] = e^{2 beta T}
  CHECK(std::fabs(mean - target) < 3.0 * se + 1e-3);
}

TEST_CASE("two-factor deterministic system reaches the shared fixed point") {
  TwoFactorModel m;
  m.beta1 = m.beta2 = -0.5;
  m.sigma1 = m.sigma2 = 0.0;
  m.gamma1 = m.gamma2 = 0.0;
  m.theta1 = m.theta2 = 0.1;
  m.measure1 = JumpMeasure::no_jumps();
  m.measure2 = JumpMeasure::no_jumps();
  m.tau = 0.0;
  m.delta = DeltaProcess::constant(2.0);
  m.history_x = flat_history(0.0, 0.0);
  m.history_y = flat_history(0.0, 0.0);

  const auto grid = GridSpec::create(0.05, 40.0);
  const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(0, 0));
  REQUIRE(p.two_factor);
  REQUIRE(p.y.size() == grid.steps + 1);
  // dX = (-X + 2) dt, dY = (-Y + X) dt: both settle at delta0 = 2
  CHECK(p.x.back() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(p.y.back() == doctest::Approx(2.0).epsilon(1e-4));

  // Y's forcing is the pre-update X: one hand step from (0, 0) gives
  // X1 = 0 + 2h, Y1 = 0 + (2*beta2*0 + X0) h = 0
  CHECK(p.x[1] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(p.y[1] == 0.0);
  CHECK(p.y[2] == doctest::Approx((0.0 + 0.1 * 0.05)).epsilon(1e-15));

  // doubling delta doubles both stationary levels
  auto m2 = m;
  m2.delta = DeltaProcess::constant(4.0);
  const auto q = simulate_path(m2, grid, SignPolicy::AbsoluteValue, RandomStream(0, 0));
  CHECK(q.x.back() == doctest::Approx(2.0 * p.x.back()).epsilon(1e-12));
  CHECK(q.y.back() == doctest::Approx(2.0 * p.y.back()).epsilon(1e-12));

  CHECK(integral_of_path(p, 40.0) == p.integral_y[grid.steps]);
  CHECK(integral_of_x(p, 40.0) == p.integral_x[grid.steps]);
}

TEST_CASE("zero second factor with zero input stays zero") {
  TwoFactorModel m;
  m.beta1 = m.beta2 = -0.5;
  m.sigma1 = m.sigma2 = 0.0;
  m.gamma1 = m.gamma2 = 0.0;
  m.theta1 = m.theta2 = 0.1;
  m.measure1 = JumpMeasure::no_jumps();
  m.measure2 = JumpMeasure::from_atoms({{1.0, 1.0}});
  m.tau = 0.0;
  m.delta = DeltaProcess::constant(0.0);
  m.history_x = flat_history(0.0, 0.0);
  m.history_y = flat_history(0.0, 0.0);
  const auto grid = GridSpec::create(0.1, 5.0);
  const auto p = simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(9, 1));
  for (double v : p.x) CHECK(v == 0.0);
  for (double v : p.y) CHECK(v == 0.0);  // jumps scale with Y = 0
}

TEST_CASE("mismatched hand-built history surfaces as delay underflow") {
  OneFactorModel m;
  m.beta = -0.5;
  m.sigma = 0.3;
  m.gamma = 0.25;
  m.tau = 1.0;  // claims delay 1
  m.delta = DeltaProcess::constant(1.0);
  m.jump = JumpCoefficient::linear_in_state(0.0);
  m.measure = JumpMeasure::no_jumps();
  m.history = flat_history(1.0, 0.5);  // but history only covers [-0.5, 0]
  const auto grid = GridSpec::create(0.25, 2.0);
  CHECK_THROWS_AS(simulate_path(m, grid, SignPolicy::AbsoluteValue, RandomStream(1, 1)),
                  DelayBufferUnderflow);
}
