#pragma once

#include <cstddef>
#include <vector>

#include "cirsim/errors.hpp"

namespace cirsim {

// One atom of a finite discrete jump measure: weight w at mark u.
struct Atom {
  double u = 0.0;  // mark, any finite real
  double w = 0.0;  // weight, > 0
};

// Finite discrete characteristic measure lambda = sum_i w_i delta_{u_i} on the
// mark space. The no-jumps case is an explicit empty variant rather than a
// zero-mass atom list, so mark sampling can reject it cleanly.
// Immutable after construction; safe to share across concurrent simulations.
class JumpMeasure {
 public:
  JumpMeasure() = default;

  static JumpMeasure no_jumps() { return JumpMeasure(); }
  static JumpMeasure from_atoms(std::vector<Atom> atoms);

  bool is_no_jumps() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(std::size_t i) const { return atoms_[i]; }

  // lambda(U); 0 for the no-jumps variant.
  double total_mass() const { return total_mass_; }

  // sum_i w_i u_i^k
  double moment(int k) const;

  // Cumulative weights c_i = w_0 + ... + w_i; used for categorical sampling.
  const std::vector<double>& cumulative_weights() const { return cumulative_; }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  double total_mass_ = 0.0;
};

// Gamma(theta, lambda) = theta^2 sum_i w_i u_i^2 (6 + 4 theta u_i + theta^2 u_i^2).
// Enters the second-moment condition on the driving factor; nonnegative for
// every real theta and marks since 6 + 4s + s^2 = (s + 2)^2 + 2 > 0.
double gamma_functional(double theta1, const JumpMeasure& m);

// m(theta, lambda) = theta^2 sum_i w_i u_i^2, the quadratic variation rate of a
// linear-in-state jump term. Equals the Lipschitz constant of g(x,u) = theta*x*u.
double m_functional(double theta1, const JumpMeasure& m);

}  // namespace cirsim
