#include <doctest.h>

#include "cirsim/measures.hpp"

using namespace cirsim;

TEST_CASE("total mass sums weights") {
  CHECK(JumpMeasure::from_atoms({{1.0, 1.0}}).total_mass() == 1.0);
  CHECK(JumpMeasure::from_atoms({{0.5, 2.0}, {1.5, 3.0}}).total_mass() == 5.0);
  CHECK(JumpMeasure::no_jumps().total_mass() == 0.0);
}

TEST_CASE("moments are weighted power sums") {
  CHECK(JumpMeasure::from_atoms({{1.0, 1.0}}).moment(2) == 1.0);
  CHECK(JumpMeasure::from_atoms({{2.0, 0.5}}).moment(2) == 2.0);
  CHECK(JumpMeasure::from_atoms({{1.0, 1.0}, {-1.0, 1.0}}).moment(1) == 0.0);
}

TEST_CASE("moment is linear in the weights") {
  const auto m = JumpMeasure::from_atoms({{0.5, 1.0}, {2.0, 3.0}, {-1.5, 0.25}});
  const auto m2 = JumpMeasure::from_atoms({{0.5, 2.0}, {2.0, 6.0}, {-1.5, 0.5}});
  for (int k = 1; k <= 4; ++k) {
    CHECK(m2.moment(k) == doctest::Approx(2.0 * m.moment(k)).epsilon(1e-15));
  }
}

TEST_CASE("gamma functional hand values") {
  const auto unit = JumpMeasure::from_atoms({{1.0, 1.0}});
  CHECK(gamma_functional(0.1, unit) == doctest::Approx(0.0641).epsilon(1e-12));
  CHECK(gamma_functional(0.0, JumpMeasure::from_atoms({{3.0, 2.0}})) == 0.0);
  CHECK(gamma_functional(1.0, JumpMeasure::from_atoms({{1.0, 2.0}})) ==
        doctest::Approx(22.0).epsilon(1e-12));
}

TEST_CASE("m functional hand values") {
  CHECK(m_functional(0.1, JumpMeasure::from_atoms({{1.0, 1.0}})) ==
        doctest::Approx(0.01).epsilon(1e-12));
  CHECK(m_functional(0.0, JumpMeasure::from_atoms({{1.0, 1.0}})) == 0.0);
  CHECK(m_functional(2.0, JumpMeasure::from_atoms({{0.5, 4.0}})) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("gamma functional expands into moments") {
  // theta^2 sum w u^2 (6 + 4 theta u + theta^2 u^2)
  //   = 6 m(theta) + 4 theta^3 moment(3) + theta^4 moment(4)
  const auto m = JumpMeasure::from_atoms({{0.7, 1.2}, {-0.3, 2.0}, {1.9, 0.1}});
  for (double theta : {0.05, 0.5, 1.0, 2.5}) {
    const double expanded = 6.0 * m_functional(theta, m) +
                            4.0 * theta * theta * theta * m.moment(3) +
                            theta * theta * theta * theta * m.moment(4);
    CHECK(gamma_functional(theta, m) == doctest::Approx(expanded).epsilon(1e-13));
  }
}

TEST_CASE("gamma functional is nonnegative for positive marks") {
  const auto m = JumpMeasure::from_atoms({{0.1, 1.0}, {2.0, 0.5}, {5.0, 0.01}});
  for (double theta : {0.0, 0.3, 1.0, 10.0}) {
    CHECK(gamma_functional(theta, m) >= 0.0);
  }
}

TEST_CASE("measure construction rejects bad atoms") {
  CHECK_THROWS_AS(JumpMeasure::from_atoms({}), ConfigError);
  CHECK_THROWS_AS(JumpMeasure::from_atoms({{1.0, -0.5}}), ConfigError);
  CHECK_THROWS_AS(JumpMeasure::from_atoms({{1.0, 0.0}}), ConfigError);  // total mass 0
  // zero-weight atoms are allowed as long as the total stays positive
  const auto m = JumpMeasure::from_atoms({{1.0, 0.0}, {2.0, 3.0}});
  CHECK(m.total_mass() == 3.0);
}

TEST_CASE("no-jumps variant reports itself") {
  const auto none = JumpMeasure::no_jumps();
  CHECK(none.is_no_jumps());
  CHECK(none.size() == 0);
  CHECK_FALSE(JumpMeasure::from_atoms({{1.0, 1.0}}).is_no_jumps());
}
