#include "cirsim/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace cirsim {

double long_term_return(const SimulatedPath& p, double t, double mu) {
  if (!(t > 0.0)) throw Error("long_term_return requires t > 0");
  return integral_of_path(p, t) / std::pow(t, mu);
}

double long_term_return_x(const SimulatedPath& p, double t, double mu) {
  if (!(t > 0.0)) throw Error("long_term_return requires t > 0");
  return integral_of_x(p, t) / std::pow(t, mu);
}

double delta_limit_estimate(const DeltaProcess& d, double t, double mu) {
  if (!(t > 0.0)) throw Error("delta_limit_estimate requires t > 0");
  return d.integral(t) / std::pow(t, mu);
}

PathSummary summarize_path(const SimulatedPath& p, const std::vector<double>& checkpoints,
                           double mu) {
  PathSummary s;
  s.stream_id = p.stream_id;
  s.returns.reserve(checkpoints.size());
  s.x_at.reserve(checkpoints.size());
  if (p.two_factor) s.returns_x.reserve(checkpoints.size());
  for (double t : checkpoints) {
    s.returns.push_back(long_term_return(p, t, mu));
    s.x_at.push_back(p.x[grid_index(p.grid, t)]);
    if (p.two_factor) s.returns_x.push_back(long_term_return_x(p, t, mu));
  }

  // Final-window oscillation of R(t): grid points with t >= horizon/10.
  const std::size_t first = std::max<std::size_t>(1, (p.grid.steps + 9) / 10);
  double lo = 0.0, hi = 0.0;
  const std::vector<double>& integral = p.two_factor ? p.integral_y : p.integral_x;
  for (std::size_t k = first; k <= p.grid.steps; ++k) {
    const double r = integral[k] / std::pow(p.times[k], mu);
    if (k == first) {
      lo = hi = r;
    } else {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  s.oscillation_range = hi - lo;

  double mn = p.x[0];
  std::uint64_t neg = 0;
  for (double v : p.x) {
    mn = std::min(mn, v);
    if (v < 0.0) ++neg;
  }
  for (double v : p.y) {
    mn = std::min(mn, v);
    if (v < 0.0) ++neg;
  }
  s.min_value = mn;
  s.negative_values = neg;
  s.total_values = p.x.size() + p.y.size();
  return s;
}

namespace {

// mean and standard error of the mean from (sum, sum of squares, n)
void mean_se(double sum, double sum2, std::size_t n, double& mean, double& se) {
  mean = sum / static_cast<double>(n);
  if (n < 2) {
    se = 0.0;
    return;
  }
  const double var = std::max(0.0, (sum2 - static_cast<double>(n) * mean * mean) /
                                       static_cast<double>(n - 1));
  se = std::sqrt(var / static_cast<double>(n));
}

}  // namespace

ConvergenceReport fold_convergence(const std::vector<PathSummary>& summaries,
                                   const std::vector<double>& checkpoints, double limit,
                                   double tol, std::optional<double> oscillation_tol,
                                   bool use_x_component) {
  if (summaries.empty()) throw EmptyPathSet("convergence report needs at least one path");
  const std::size_t c = checkpoints.size();
  std::vector<double> sum(c, 0.0), sum2(c, 0.0);
  double osc = 0.0;
  for (const PathSummary& s : summaries) {
    const std::vector<double>& r = use_x_component ? s.returns_x : s.returns;
    for (std::size_t i = 0; i < c; ++i) {
      sum[i] += r[i];
      sum2[i] += r[i] * r[i];
    }
    osc = std::max(osc, s.oscillation_range);
  }

  const double scale = std::max(1.0, std::fabs(limit));
  ConvergenceReport rep;
  rep.limit = limit;
  rep.tolerance = tol;
  rep.checkpoints.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    CheckpointStat& st = rep.checkpoints[i];
    st.t = checkpoints[i];
    mean_se(sum[i], sum2[i], summaries.size(), st.mean, st.std_error);
    st.limit = limit;
    st.abs_error = std::fabs(st.mean - limit);
    st.rel_error = st.abs_error / scale;
  }
  rep.converged = !rep.checkpoints.empty() && rep.checkpoints.back().abs_error <= tol * scale;
  rep.max_path_oscillation = osc / scale;
  rep.oscillation_tolerance = oscillation_tol;
  rep.oscillation_ok = !oscillation_tol || rep.max_path_oscillation <= *oscillation_tol;
  return rep;
}

MomentDiagnostics fold_moments(const std::vector<PathSummary>& summaries,
                               const std::vector<double>& checkpoints) {
  if (summaries.empty()) throw EmptyPathSet("moment diagnostics need at least one path");
  const std::size_t c = checkpoints.size();
  std::vector<double> s1(c, 0.0), s2(c, 0.0), s4(c, 0.0), s8(c, 0.0);
  for (const PathSummary& s : summaries) {
    for (std::size_t i = 0; i < c; ++i) {
      const double x = s.x_at[i];
      const double x2 = x * x;
      const double x4 = x2 * x2;
      s1[i] += x;
      s2[i] += x2;
      s4[i] += x4;
      s8[i] += x4 * x4;
    }
  }
  MomentDiagnostics d;
  d.checkpoints.resize(c);
  const std::size_t n = summaries.size();
  for (std::size_t i = 0; i < c; ++i) {
    MomentCheckpoint& m = d.checkpoints[i];
    m.t = checkpoints[i];
    mean_se(s1[i], s2[i], n, m.mean_x, m.se_x);
    mean_se(s2[i], s4[i], n, m.mean_x2, m.se_x2);
    mean_se(s4[i], s8[i], n, m.mean_x4, m.se_x4);
  }
  return d;
}

namespace {

std::vector<PathSummary> summarize_all(const std::vector<SimulatedPath>& paths,
                                       const std::vector<double>& checkpoints, double mu) {
  std::vector<PathSummary> out;
  out.reserve(paths.size());
  for (const SimulatedPath& p : paths) out.push_back(summarize_path(p, checkpoints, mu));
  return out;
}

}  // namespace

ConvergenceReport convergence_report_one_factor(const std::vector<SimulatedPath>& paths,
                                                const OneFactorModel& m, double mu,
                                                const std::vector<double>& checkpoints,
                                                double tol) {
  if (paths.empty()) throw EmptyPathSet("convergence report needs at least one path");
  return fold_convergence(summarize_all(paths, checkpoints, mu), checkpoints,
                          analytic_limit_one_factor(m), tol, std::nullopt, false);
}

ConvergenceReport convergence_report_two_factor(const std::vector<SimulatedPath>& paths,
                                                const TwoFactorModel& m, double mu,
                                                const std::vector<double>& checkpoints,
                                                double tol) {
  if (paths.empty()) throw EmptyPathSet("convergence report needs at least one path");
  return fold_convergence(summarize_all(paths, checkpoints, mu), checkpoints,
                          analytic_limit_two_factor(m), tol, std::nullopt, false);
}

MomentDiagnostics moment_diagnostics(const std::vector<SimulatedPath>& paths,
                                     const std::vector<double>& checkpoints) {
  if (paths.empty()) throw EmptyPathSet("moment diagnostics need at least one path");
  // mu does not enter the moment columns; any value works for summarize_path.
  return fold_moments(summarize_all(paths, checkpoints, 1.0), checkpoints);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

namespace {

// int_0^t exp(2*beta*r) * delta(t - r) dr by composite Gauss-Legendre on the
// decaying kernel; the cutoff drops a tail below ~1e-26 relative weight.
double convolution_quadrature(const DeltaProcess& delta, double beta, double t) {
  double cut = t;
  if (beta < 0.0) cut = std::min(t, 60.0 / (-2.0 * beta));
  static thread_local std::vector<double> gl_x, gl_w;
  if (gl_x.empty()) gauss_legendre(20, gl_x, gl_w);
  const int panels = 64;
  const double width = cut / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    double acc = 0.0;
    for (std::size_t q = 0; q < gl_x.size(); ++q) {
      const double r = a + 0.5 * width * (gl_x[q] + 1.0);
      acc += gl_w[q] * std::exp(2.0 * beta * r) * delta.value(t - r);
    }
    total += 0.5 * width * acc;
  }
  return total;
}

// int_{s0}^{s1} exp(2*beta*(t-s)) * (a + b*s) ds in closed form (beta != 0).
double segment_convolution(double beta, double t, double s0, double s1, double a, double b) {
  const double tb = 2.0 * beta;
  const double c2 = -b / tb;
  const double c1 = (c2 - a) / tb;
  const double f1 = std::exp(tb * (t - s1)) * (c1 + c2 * s1);
  const double f0 = std::exp(tb * (t - s0)) * (c1 + c2 * s0);
  return f1 - f0;
}

}  // namespace

double mean_ode_oracle(const OneFactorModel& m, double t) {
  const double m0 = m.history.value(0.0);
  if (t == 0.0) return m0;
  if (m.beta == 0.0) return m0 + m.delta.integral(t);
  const double tb = 2.0 * m.beta;
  const double homogeneous = std::exp(tb * t) * m0;
  switch (m.delta.kind()) {
    case DeltaProcess::Kind::Constant:
      return homogeneous + m.delta.constant_value() * std::expm1(tb * t) / tb;
    case DeltaProcess::Kind::PowerLaw:
      return homogeneous + convolution_quadrature(m.delta, m.beta, t);
    case DeltaProcess::Kind::TableDriven: {
      double conv = 0.0;
      const std::vector<Knot>& ks = m.delta.knots();
      for (std::size_t i = 0; i + 1 < ks.size() && ks[i].t < t; ++i) {
        const double s0 = ks[i].t;
        const double s1 = std::min(ks[i + 1].t, t);
        const double slope = (ks[i + 1].v - ks[i].v) / (ks[i + 1].t - ks[i].t);
        conv += segment_convolution(m.beta, t, s0, s1, ks[i].v - slope * s0, slope);
      }
      if (t > ks.back().t) {
        conv += segment_convolution(m.beta, t, ks.back().t, t, ks.back().v, 0.0);
      }
      return homogeneous + conv;
    }
  }
  return homogeneous;
}

std::vector<double> default_checkpoints(const GridSpec& grid) {
  static constexpr double fractions[] = {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
  std::vector<double> out;
  for (double f : fractions) {
    const auto k = std::max<long long>(
        1, std::llround(f * static_cast<double>(grid.steps)));
    const double t = grid.time(static_cast<std::size_t>(k));
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

}  // namespace cirsim
