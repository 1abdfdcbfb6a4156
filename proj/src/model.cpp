#include "cirsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

namespace cirsim {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void check_knots(const std::vector<Knot>& knots, const char* what) {
  if (knots.empty()) throw ConfigError(std::string(what) + ": empty table");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].t) || !std::isfinite(knots[i].v)) {
      throw ConfigError(std::string(what) + ": non-finite entry");
    }
    if (i > 0 && !(knots[i].t > knots[i - 1].t)) {
      throw ConfigError(std::string(what) + ": times must be strictly increasing");
    }
  }
}

}  // namespace

DeltaProcess DeltaProcess::constant(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ConfigError("constant delta must be finite and >= 0");
  }
  DeltaProcess d;
  d.kind_ = Kind::Constant;
  d.constant_ = value;
  return d;
}

DeltaProcess DeltaProcess::power_law(double mu) {
  if (!std::isfinite(mu) || mu < 1.0) {
    throw ConfigError("power-law delta needs mu >= 1");
  }
  DeltaProcess d;
  d.kind_ = Kind::PowerLaw;
  d.mu_ = mu;
  return d;
}

DeltaProcess DeltaProcess::table(std::vector<Knot> knots) {
  check_knots(knots, "delta table");
  if (knots.front().t != 0.0) throw ConfigError("delta table must start at t = 0");
  for (const Knot& k : knots) {
    if (k.v < 0.0) throw ConfigError("delta table values must be >= 0");
  }
  DeltaProcess d;
  d.kind_ = Kind::TableDriven;
  d.knots_ = std::move(knots);
  d.knot_integral_.resize(d.knots_.size());
  d.knot_integral_[0] = 0.0;
  for (std::size_t i = 1; i < d.knots_.size(); ++i) {
    const Knot& a = d.knots_[i - 1];
    const Knot& b = d.knots_[i];
    d.knot_integral_[i] = d.knot_integral_[i - 1] + 0.5 * (a.v + b.v) * (b.t - a.t);
  }
  return d;
}

double DeltaProcess::value(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::PowerLaw:
      return std::pow(t, mu_ - 1.0);
    case Kind::TableDriven: {
      if (t <= knots_.front().t) return knots_.front().v;
      if (t >= knots_.back().t) return knots_.back().v;  // hold last value
      auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                 [](double x, const Knot& k) { return x < k.t; });
      const Knot& hi = *it;
      const Knot& lo = *(it - 1);
      const double w = (t - lo.t) / (hi.t - lo.t);
      return lo.v + w * (hi.v - lo.v);
    }
  }
  return 0.0;
}

double DeltaProcess::integral(double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Constant:
      return constant_ * t;
    case Kind::PowerLaw:
      return std::pow(t, mu_) / mu_;
    case Kind::TableDriven: {
      const Knot& last = knots_.back();
      if (t >= last.t) return knot_integral_.back() + last.v * (t - last.t);
      auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                 [](double x, const Knot& k) { return x < k.t; });
      const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
      const Knot& lo = knots_[hi - 1];
      return knot_integral_[hi - 1] + 0.5 * (lo.v + value(t)) * (t - lo.t);
    }
  }
  return 0.0;
}

std::optional<double> DeltaProcess::known_mu() const {
  switch (kind_) {
    case Kind::Constant: return 1.0;
    case Kind::PowerLaw: return mu_;
    case Kind::TableDriven: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> DeltaProcess::known_nu() const {
  switch (kind_) {
    case Kind::Constant: return constant_;
    case Kind::PowerLaw: return 1.0 / mu_;
    case Kind::TableDriven: return std::nullopt;
  }
  return std::nullopt;
}

JumpCoefficient JumpCoefficient::linear_in_state(double theta) {
  if (!std::isfinite(theta)) throw ConfigError("jump theta must be finite");
  JumpCoefficient j;
  j.kind_ = Kind::LinearInState;
  j.theta_ = theta;
  return j;
}

JumpCoefficient JumpCoefficient::custom(std::vector<double> x_grid,
                                        std::vector<std::vector<double>> values) {
  if (x_grid.size() < 2) throw ConfigError("custom jump table needs at least two x knots");
  if (x_grid.front() != 0.0) throw ConfigError("custom jump table must start at x = 0");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!std::isfinite(x_grid[i])) throw ConfigError("custom jump x knot must be finite");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) {
      throw ConfigError("custom jump x knots must be strictly increasing");
    }
  }
  if (values.empty()) throw ConfigError("custom jump table needs at least one atom row");
  for (const auto& row : values) {
    if (row.size() != x_grid.size()) {
      throw ConfigError("custom jump row length must match the x grid");
    }
    if (row.front() != 0.0) throw ConfigError("custom jump requires g(0, u) = 0");
    for (double v : row) {
      if (!std::isfinite(v)) throw ConfigError("custom jump value must be finite");
    }
  }
  JumpCoefficient j;
  j.kind_ = Kind::Custom;
  j.x_grid_ = std::move(x_grid);
  j.values_ = std::move(values);
  return j;
}

double JumpCoefficient::evaluate(double x, std::size_t atom_index, const JumpMeasure& m) const {
  if (kind_ == Kind::LinearInState) return theta_ * x * m.atom(atom_index).u;
  const std::vector<double>& row = values_.at(atom_index);
  const std::size_t n = x_grid_.size();
  std::size_t seg;  // interpolate on [seg, seg+1], extrapolating end segments
  if (x <= x_grid_.front()) {
    seg = 0;
  } else if (x >= x_grid_.back()) {
    seg = n - 2;
  } else {
    seg = static_cast<std::size_t>(
              std::upper_bound(x_grid_.begin(), x_grid_.end(), x) - x_grid_.begin()) -
          1;
  }
  const double slope = (row[seg + 1] - row[seg]) / (x_grid_[seg + 1] - x_grid_[seg]);
  return row[seg] + slope * (x - x_grid_[seg]);
}

double JumpCoefficient::compensator(double x, const JumpMeasure& m) const {
  if (kind_ == Kind::LinearInState) return theta_ * x * m.moment(1);
  double c = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) c += m.atom(i).w * evaluate(x, i, m);
  return c;
}

double lipschitz_constant(const JumpCoefficient& j, const JumpMeasure& m) {
  if (j.kind() == JumpCoefficient::Kind::LinearInState) {
    return j.theta() * j.theta() * m.moment(2);
  }
  const std::vector<double>& xs = j.x_grid();
  double k = 0.0;
  for (std::size_t seg = 0; seg + 1 < xs.size(); ++seg) {
    double seg_k = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::vector<double>& row = j.values()[i];
      const double slope = (row[seg + 1] - row[seg]) / (xs[seg + 1] - xs[seg]);
      seg_k += m.atom(i).w * slope * slope;
    }
    k = std::max(k, seg_k);
  }
  return k;
}

bool check_a4(const JumpCoefficient& j, const JumpMeasure& m) {
  if (m.is_no_jumps()) return true;
  if (j.kind() == JumpCoefficient::Kind::LinearInState) {
    for (const Atom& a : m.atoms()) {
      if (1.0 + j.theta() * a.u < 0.0) return false;
    }
    return true;
  }
  const std::vector<double>& xs = j.x_grid();
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::vector<double>& row = j.values()[i];
    for (std::size_t k = 0; k < n; ++k) {
      if (xs[k] + row[k] < 0.0) return false;
    }
    const double tail_slope = (row[n - 1] - row[n - 2]) / (xs[n - 1] - xs[n - 2]);
    if (1.0 + tail_slope < 0.0) return false;
  }
  return true;
}

HistorySegment HistorySegment::from_points(std::vector<Knot> points, double tau) {
  if (!std::isfinite(tau) || tau < 0.0) throw ConfigError("tau must be finite and >= 0");
  check_knots(points, "history");
  for (const Knot& p : points) {
    if (p.v < 0.0) throw ConfigError("history values must be >= 0");
  }
  const double tol = 1e-9 * std::max(1.0, tau);
  if (tau == 0.0) {
    if (points.size() != 1 || std::fabs(points.front().t) > tol) {
      throw ConfigError("tau = 0 history must be a single point at t = 0");
    }
  } else {
    if (points.size() < 2) throw ConfigError("history must cover [-tau, 0]");
    if (std::fabs(points.front().t + tau) > tol) {
      throw ConfigError("history must start at t = -tau");
    }
    if (std::fabs(points.back().t) > tol) throw ConfigError("history must end at t = 0");
  }
  points.front().t = -tau;
  points.back().t = 0.0;
  HistorySegment h;
  h.points_ = std::move(points);
  h.tau_ = tau;
  return h;
}

double HistorySegment::value(double t) const {
  const double lo = points_.front().t;
  const double hi = points_.back().t;
  const double tol = 1e-9 * std::max(1.0, std::fabs(lo));
  if (t < lo) {
    if (lo - t > tol) {
      throw DelayBufferUnderflow("lookup at t = " + num(t) + " before history start " + num(lo));
    }
    t = lo;
  } else if (t > hi) {
    if (t - hi > tol) {
      throw DelayBufferUnderflow("lookup at t = " + num(t) + " after history end " + num(hi));
    }
    t = hi;
  }
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double x, const Knot& k) { return x < k.t; });
  if (it == points_.begin()) return points_.front().v;
  if (it == points_.end()) return points_.back().v;
  const Knot& b = *it;
  const Knot& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return a.v + w * (b.v - a.v);
}

bool ValidationReport::passed() const {
  for (const ValidationCheck& c : checks) {
    if (c.status == CheckStatus::Fail) return false;
  }
  return true;
}

const ValidationCheck* ValidationReport::find(const std::string& id) const {
  for (const ValidationCheck& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::string s;
  for (const ValidationCheck& c : checks) {
    if (c.status != CheckStatus::Fail) continue;
    if (!s.empty()) s += ", ";
    s += c.id;
  }
  return s;
}

namespace {

void require_finite_params(std::initializer_list<std::pair<const char*, double>> params) {
  for (const auto& [name, v] : params) {
    if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
  }
}

void require_history_matches(const HistorySegment& h, double tau, const char* which) {
  if (std::fabs(h.tau() - tau) > 1e-12 * std::max(1.0, std::fabs(tau))) {
    throw ConfigError(std::string(which) + " history covers [-" + num(h.tau()) +
                      ", 0] but the model delay is tau = " + num(tau));
  }
}

void require_jump_rows_match(const JumpCoefficient& j, const JumpMeasure& m) {
  if (j.kind() == JumpCoefficient::Kind::Custom && !m.is_no_jumps() &&
      j.values().size() != m.size()) {
    throw ConfigError("custom jump table has " + std::to_string(j.values().size()) +
                      " atom rows but the measure has " + std::to_string(m.size()) + " atoms");
  }
}

ValidationCheck check_delta_pair(const DeltaProcess& d) {
  if (auto mu = d.known_mu()) {
    return {"A2", CheckStatus::Pass,
            "delta limit known analytically: mu = " + num(*mu) + ", nu = " + num(*d.known_nu())};
  }
  return {"A2", CheckStatus::Unverifiable,
          "table-driven delta: (mu, nu) not analytic, supply mu explicitly for experiments"};
}

ValidationCheck check_delta_integrability(const DeltaProcess& d) {
  switch (d.kind()) {
    case DeltaProcess::Kind::Constant:
      return {"A7", CheckStatus::Pass,
              "constant delta: int delta^4/(1+t)^2 dt finite (exponent 1)"};
    case DeltaProcess::Kind::PowerLaw: {
      const double exponent = 2.0 * d.power() - 1.0;
      return {"A7", CheckStatus::Pass,
              "power-law delta: integrability holds with exponent 2*mu - 1 = " + num(exponent)};
    }
    case DeltaProcess::Kind::TableDriven:
      return {"A7", CheckStatus::Unverifiable,
              "table-driven delta: integrability not checkable from a finite table"};
  }
  return {"A7", CheckStatus::Unverifiable, ""};
}

ValidationCheck check_a1_block(const char* id, double beta, double sigma, double gamma,
                               const double* theta) {
  std::string bad;
  if (!(beta < 0.0)) bad += " beta = " + num(beta) + " (needs < 0);";
  if (!(sigma > 0.0)) bad += " sigma = " + num(sigma) + " (needs > 0);";
  if (!(gamma >= 0.0 && gamma < 0.5)) bad += " gamma = " + num(gamma) + " (needs [0, 1/2));";
  if (theta && !(*theta > 0.0)) bad += " theta = " + num(*theta) + " (needs > 0);";
  if (!bad.empty()) return {id, CheckStatus::Fail, "violates:" + bad};
  std::string ok = "beta = " + num(beta) + " < 0, sigma = " + num(sigma) +
                   " > 0, gamma = " + num(gamma) + " in [0, 1/2)";
  if (theta) ok += ", theta = " + num(*theta) + " > 0";
  return {id, CheckStatus::Pass, ok};
}

}  // namespace

void require_well_formed(const OneFactorModel& m) {
  require_finite_params({{"beta", m.beta}, {"sigma", m.sigma}, {"gamma", m.gamma}, {"tau", m.tau}});
  require_history_matches(m.history, m.tau, "one-factor");
  require_jump_rows_match(m.jump, m.measure);
}

void require_well_formed(const TwoFactorModel& m) {
  require_finite_params({{"beta1", m.beta1},
                         {"sigma1", m.sigma1},
                         {"gamma1", m.gamma1},
                         {"theta1", m.theta1},
                         {"beta2", m.beta2},
                         {"sigma2", m.sigma2},
                         {"gamma2", m.gamma2},
                         {"theta2", m.theta2},
                         {"tau", m.tau}});
  require_history_matches(m.history_x, m.tau, "X");
  require_history_matches(m.history_y, m.tau, "Y");
}

ValidationReport validate_one_factor(const OneFactorModel& m) {
  ValidationReport r;
  r.checks.push_back(check_a1_block("A1", m.beta, m.sigma, m.gamma, nullptr));
  r.checks.push_back(check_delta_pair(m.delta));

  const double k = lipschitz_constant(m.jump, m.measure);
  r.checks.push_back({"A3", CheckStatus::Pass, "jump Lipschitz constant K = " + num(k)});

  const bool a4 = check_a4(m.jump, m.measure);
  r.checks.push_back({"A4", a4 ? CheckStatus::Pass : CheckStatus::Fail,
                      a4 ? "x + theta*g(x,u) >= 0 for theta in [0,1] on all marks"
                         : "x + g(x,u) < 0 for some mark; jumps can push the state negative"});

  const double side = 4.0 * m.beta + k;
  r.checks.push_back({"side", side < 0.0 ? CheckStatus::Pass : CheckStatus::Fail,
                      "4*beta + K = " + num(side) + (side < 0.0 ? " < 0" : " >= 0")});

  r.checks.push_back(check_delta_integrability(m.delta));
  return r;
}

ValidationReport validate_two_factor(const TwoFactorModel& m) {
  ValidationReport r;
  r.checks.push_back(check_a1_block("A5", m.beta1, m.sigma1, m.gamma1, &m.theta1));

  ValidationCheck a6 = check_a1_block("A6", m.beta2, m.sigma2, m.gamma2, &m.theta2);
  if (a6.status == CheckStatus::Pass) {
    const double m2 = m.theta2 * m.theta2 * m.measure2.moment(2);
    const double bound2 = -4.0 * m.beta2;
    if (m2 < bound2) {
      a6.detail += "; theta2^2 * int u^2 lambda2 = " + num(m2) + " < " + num(bound2);
    } else {
      a6.status = CheckStatus::Fail;
      a6.detail = "theta2^2 * int u^2 lambda2 = " + num(m2) + " >= -4*beta2 = " + num(bound2);
    }
  }
  r.checks.push_back(a6);

  const double g1 = gamma_functional(m.theta1, m.measure1);
  const double bound_g = -8.0 * m.beta1;
  r.checks.push_back({"Gamma", g1 < bound_g ? CheckStatus::Pass : CheckStatus::Fail,
                      "Gamma(theta1, lambda1) = " + num(g1) + (g1 < bound_g ? " < " : " >= ") +
                          num(bound_g)});

  const double m1 = m_functional(m.theta1, m.measure1);
  const double bound_m = -4.0 * m.beta1;
  r.checks.push_back({"m1", m1 < bound_m ? CheckStatus::Pass : CheckStatus::Fail,
                      "m(theta1, lambda1) = " + num(m1) + (m1 < bound_m ? " < " : " >= ") +
                          num(bound_m)});

  r.checks.push_back(check_delta_pair(m.delta));
  r.checks.push_back(check_delta_integrability(m.delta));
  return r;
}

double analytic_limit_one_factor(const OneFactorModel& m) {
  const auto nu = m.delta.known_nu();
  if (!nu) throw UnknownNu("one-factor limit needs an analytic nu (constant or power-law delta)");
  return -*nu / (2.0 * m.beta);
}

double analytic_limit_two_factor(const TwoFactorModel& m) {
  const auto nu = m.delta.known_nu();
  if (!nu) throw UnknownNu("two-factor limit needs an analytic nu (constant or power-law delta)");
  return *nu / (4.0 * m.beta1 * m.beta2);
}

double analytic_limit_two_factor_x(const TwoFactorModel& m) {
  const auto nu = m.delta.known_nu();
  if (!nu) throw UnknownNu("two-factor limit needs an analytic nu (constant or power-law delta)");
  return -*nu / (2.0 * m.beta1);
}

}  // namespace cirsim
