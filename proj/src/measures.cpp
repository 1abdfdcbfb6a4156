#include "cirsim/measures.hpp"

#include <cmath>

namespace cirsim {

JumpMeasure JumpMeasure::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) {
    throw ConfigError("jump measure needs at least one atom; use no_jumps() for the empty measure");
  }
  JumpMeasure m;
  m.atoms_ = std::move(atoms);
  m.cumulative_.reserve(m.atoms_.size());
  double running = 0.0;
  for (const Atom& a : m.atoms_) {
    if (!std::isfinite(a.u)) throw ConfigError("jump measure mark must be finite");
    if (!std::isfinite(a.w) || a.w < 0.0) {
      throw ConfigError("jump measure weight must be finite and >= 0");
    }
    running += a.w;
    m.cumulative_.push_back(running);
  }
  if (running <= 0.0) {
    throw ConfigError("jump measure total mass must be > 0; use no_jumps() for the empty measure");
  }
  m.total_mass_ = running;
  return m;
}

double JumpMeasure::moment(int k) const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.w * std::pow(a.u, k);
  return s;
}

double gamma_functional(double theta1, const JumpMeasure& m) {
  const double t2 = theta1 * theta1;
  double s = 0.0;
  for (const Atom& a : m.atoms()) {
    const double u2 = a.u * a.u;
    s += a.w * u2 * (6.0 + 4.0 * theta1 * a.u + t2 * u2);
  }
  return t2 * s;
}

double m_functional(double theta1, const JumpMeasure& m) {
  return theta1 * theta1 * m.moment(2);
}

}  // namespace cirsim
