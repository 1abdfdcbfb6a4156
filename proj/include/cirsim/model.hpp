#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cirsim/errors.hpp"
#include "cirsim/measures.hpp"

namespace cirsim {

// A (time, value) knot of a piecewise-linear table.
struct Knot {
  double t = 0.0;
  double v = 0.0;
};

// Deterministic nonnegative forcing term delta(t).
//
// Constant and PowerLaw expose their scaling pair (mu, nu) with
// nu = lim t^{-mu} int_0^t delta(s) ds analytically:
//   Constant(d0):  mu = 1, nu = d0
//   PowerLaw(mu):  delta(t) = t^{mu-1}, nu = 1/mu
// TableDriven interpolates linearly between knots and holds its last value
// beyond the table; it has no analytic (mu, nu).
class DeltaProcess {
 public:
  enum class Kind { Constant, PowerLaw, TableDriven };

  static DeltaProcess constant(double value);
  static DeltaProcess power_law(double mu);
  static DeltaProcess table(std::vector<Knot> knots);

  Kind kind() const { return kind_; }
  double value(double t) const;

  // int_0^t delta(s) ds; closed form for Constant/PowerLaw, exact trapezoid
  // (the table is piecewise linear) plus the held tail for TableDriven.
  double integral(double t) const;

  std::optional<double> known_mu() const;
  std::optional<double> known_nu() const;

  double constant_value() const { return constant_; }
  double power() const { return mu_; }
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  DeltaProcess() = default;

  Kind kind_ = Kind::Constant;
  double constant_ = 0.0;
  double mu_ = 1.0;
  std::vector<Knot> knots_;
  std::vector<double> knot_integral_;  // cumulative integral at each knot
};

// State-to-jump-size map g(x, u) with g(0, u) = 0.
//
// LinearInState: g(x, u) = theta * x * u.
// Custom: per-atom piecewise-linear tables over a shared x-grid starting at
// x = 0 with g(i, 0) = 0; outside the grid the first/last segment slopes
// extrapolate, which keeps the Lipschitz bound valid globally.
class JumpCoefficient {
 public:
  enum class Kind { LinearInState, Custom };

  static JumpCoefficient linear_in_state(double theta);
  static JumpCoefficient custom(std::vector<double> x_grid,
                                std::vector<std::vector<double>> values);

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  const std::vector<double>& x_grid() const { return x_grid_; }
  const std::vector<std::vector<double>>& values() const { return values_; }

  // g(x, u) for atom `atom_index` of `m`.
  double evaluate(double x, std::size_t atom_index, const JumpMeasure& m) const;

  // Compensator drift c(x) = int g(x,u) lambda(du) = sum_i w_i g(x, u_i);
  // closed form theta * x * moment(m, 1) for LinearInState.
  double compensator(double x, const JumpMeasure& m) const;

 private:
  JumpCoefficient() = default;

  Kind kind_ = Kind::LinearInState;
  double theta_ = 0.0;
  std::vector<double> x_grid_;
  std::vector<std::vector<double>> values_;  // values_[atom][knot]
};

// Tightest representable K with int |g(x,u)-g(y,u)|^2 lambda(du) <= K|x-y|^2.
// LinearInState: theta^2 * moment(m, 2). Custom: max over x-segments of
// sum_i w_i * slope_i^2 (valid bound: on each segment the difference quotient
// is exact, and across segments it is a convex combination of per-segment ones).
double lipschitz_constant(const JumpCoefficient& j, const JumpMeasure& m);

// State-positivity condition: x + theta*g(x,u) >= 0 for theta in [0,1] and all
// x > 0, marks u. Linear in theta, so theta = 1 is the binding case.
// LinearInState: holds iff 1 + theta*u >= 0 for every atom mark.
// Custom: checked at the tabulated knots (x + g is piecewise linear, so knots
// are exact) plus the tail slope condition 1 + last_slope >= 0.
bool check_a4(const JumpCoefficient& j, const JumpMeasure& m);

// Initial segment xi on [-tau, 0]: piecewise-linear, nonnegative, covering the
// interval exactly. Supplies delayed values before the simulation warms up.
class HistorySegment {
 public:
  static HistorySegment from_points(std::vector<Knot> points, double tau);

  // Linear interpolation; lookups a hair outside [-tau, 0] (within 1e-9
  // absolute-or-relative) clamp to the endpoint, anything further throws
  // DelayBufferUnderflow.
  double value(double t) const;

  double tau() const { return tau_; }
  const std::vector<Knot>& points() const { return points_; }

 private:
  std::vector<Knot> points_;
  double tau_ = 0.0;
};

struct OneFactorModel {
  double beta = 0.0;   // mean-reversion rate, < 0
  double sigma = 0.0;  // diffusion scale, > 0
  double gamma = 0.0;  // delayed-state exponent, in [0, 1/2)
  double tau = 0.0;    // delay, >= 0
  DeltaProcess delta = DeltaProcess::constant(0.0);
  JumpCoefficient jump = JumpCoefficient::linear_in_state(0.0);
  JumpMeasure measure;
  HistorySegment history;
};

// Two coupled factors: X evolves as the one-factor model with jump
// g(x,u) = theta1*x*u against measure1; Y has drift 2*beta2*Y + X, its own
// delayed diffusion, and jumps theta2*Y*u against measure2.
struct TwoFactorModel {
  double beta1 = 0.0, beta2 = 0.0;
  double sigma1 = 0.0, sigma2 = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0;
  double theta1 = 0.0, theta2 = 0.0;
  JumpMeasure measure1, measure2;
  double tau = 0.0;
  DeltaProcess delta = DeltaProcess::constant(0.0);
  HistorySegment history_x;
  HistorySegment history_y;
};

enum class CheckStatus { Pass, Fail, Unverifiable };

struct ValidationCheck {
  std::string id;      // "A1".."A7", "side", "Gamma", "m1"
  CheckStatus status = CheckStatus::Pass;
  std::string detail;  // computed quantities, human-readable
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  // Pass when nothing failed; Unverifiable entries (table-driven delta
  // integrability) count as warnings, not failures.
  bool passed() const;
  const ValidationCheck* find(const std::string& id) const;
  std::string summary() const;  // ids of failing checks, comma separated
};

// Structural coherence (history covers [-tau,0], custom jump tables match the
// atom count); throws ConfigError. Assumption checks live in the validators.
void require_well_formed(const OneFactorModel& m);
void require_well_formed(const TwoFactorModel& m);

// Checks per assumption:
//   A1: beta < 0, sigma > 0, gamma in [0, 1/2)
//   A2: delta exposes (mu, nu) analytically (table-driven: unverifiable)
//   A3: Lipschitz constant K, reported with its value
//   A4: state positivity of the jump map (check_a4)
//   side: 4*beta + K < 0
//   A7: delta integrability (analytic for Constant/PowerLaw, else unverifiable)
ValidationReport validate_one_factor(const OneFactorModel& m);

// Checks: A5, A6 (including theta2^2 * moment(measure2, 2) < -4*beta2),
// Gamma: gamma_functional(theta1, measure1) < -8*beta1,
// m1: m_functional(theta1, measure1) < -4*beta1, plus A2/A7 on delta.
ValidationReport validate_two_factor(const TwoFactorModel& m);

// Long-term return limits; throw UnknownNu when delta has no analytic nu.
// One-factor: -nu / (2*beta). Two-factor (Y component): nu / (4*beta1*beta2).
double analytic_limit_one_factor(const OneFactorModel& m);
double analytic_limit_two_factor(const TwoFactorModel& m);
// X component of the two-factor system obeys the one-factor formula.
double analytic_limit_two_factor_x(const TwoFactorModel& m);

inline double delta_value(const DeltaProcess& d, double t) { return d.value(t); }

}  // namespace cirsim
