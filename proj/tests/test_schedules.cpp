#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "petrec/schedules.hpp"

using namespace petrec;

TEST_CASE("power-law momentum values follow the closed form") {
  GNSchedule s{0.125, 1.0, 1.0};
  CHECK(gn_t(s, 0) == 1.0);
  CHECK(gn_t(s, 8) == 2.0);
  CHECK(gn_t(s, 16) == 3.0);

  const Momentum m = gn_momentum(s, 8);
  CHECK(m.t_prev == doctest::Approx(1.875));
  CHECK(m.t_curr == doctest::Approx(2.0));
  CHECK(m.theta == doctest::Approx(0.875 / 2.0));

  SUBCASE("first step has no extrapolation when b = 1") {
    CHECK(gn_momentum(s, 1).theta == doctest::Approx(0.0));
  }
  SUBCASE("fractional exponents") {
    GNSchedule half{1.0, 1.0, 0.5};
    CHECK(gn_t(half, 9) == doctest::Approx(4.0));
  }
  SUBCASE("invalid indices are rejected") {
    CHECK_THROWS_AS(gn_t(s, -1), std::invalid_argument);
    CHECK_THROWS_AS(gn_momentum(s, 0), std::invalid_argument);
  }
}

TEST_CASE("solver-grade schedule validation") {
  validate_gn_for_solver(GNSchedule{0.125, 1.0, 1.0});
  validate_gn_for_solver(GNSchedule{2.0, 1.0, 0.75});
  CHECK_THROWS_AS(validate_gn_for_solver(GNSchedule{0.0, 1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate_gn_for_solver(GNSchedule{0.5, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate_gn_for_solver(GNSchedule{0.5, 1.0, 1.5}), std::invalid_argument);

  SUBCASE("omega = 1 requires a < 1/2 and says so") {
    try {
      validate_gn_for_solver(GNSchedule{0.6, 1.0, 1.0});
      FAIL("expected a rejection");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("1/2") != std::string::npos);
    }
    validate_gn_for_solver(GNSchedule{0.49, 1.0, 1.0});
    CHECK_THROWS_AS(validate_gn_for_solver(GNSchedule{0.5, 1.0, 1.0}), std::invalid_argument);
  }
}

TEST_CASE("theta sequences advance consistently") {
  SUBCASE("none is constant zero with unit t") {
    ThetaSequence seq = ThetaSequence::none();
    for (int k = 1; k <= 5; ++k) {
      CHECK(seq.next() == 0.0);
      CHECK(seq.t_curr() == 1.0);
    }
  }
  SUBCASE("generalized matches gn_momentum") {
    GNSchedule s{0.25, 1.0, 0.75};
    ThetaSequence seq = ThetaSequence::generalized(s);
    CHECK(seq.t_curr() == gn_t(s, 0));
    for (long k = 1; k <= 20; ++k) {
      const Momentum m = gn_momentum(s, k);
      CHECK(seq.next() == doctest::Approx(m.theta).epsilon(1e-15));
      CHECK(seq.t_prev() == doctest::Approx(m.t_prev).epsilon(1e-15));
      CHECK(seq.t_curr() == doctest::Approx(m.t_curr).epsilon(1e-15));
    }
  }
  SUBCASE("classic recurrence satisfies its defining identity exactly") {
    ThetaSequence seq = ThetaSequence::nesterov();
    CHECK(seq.next() == doctest::Approx(0.0));  // t_0 = 1 makes theta_1 = 0
    double t_prev = seq.t_curr();
    CHECK(t_prev == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
    for (int k = 2; k <= 30; ++k) {
      seq.next();
      const double t = seq.t_curr();
      // t_k(t_k - 1) = t_{k-1}^2 is exact for this recurrence
      CHECK(t * (t - 1.0) == doctest::Approx(t_prev * t_prev).epsilon(1e-12));
      t_prev = t;
    }
  }
}

TEST_CASE("momentum condition audit separates valid and invalid schedules") {
  const long horizon = 20000;

  SUBCASE("linear growth with small slope holds") {
    const auto rep = momentum_condition_check(GNSchedule{0.125, 1.0, 1.0}, horizon);
    CHECK(rep.holds());
    CHECK(rep.gap_positive_tail);
    // ratio t_{k-1}/gap converges to 1/(1 - 2a) = 4/3 from below
    CHECK(rep.rho >= 4.0 / 3.0 * 0.999);
    CHECK(rep.rho <= 2.0);
    // t_{k-1}/t_k = (k-1+8)/(k+8) bottoms out at k = 1 with 8/9
    CHECK(rep.c1 == doctest::Approx(8.0 / 9.0));
    CHECK(rep.c2 <= 1.0 + 1e-12);
    CHECK(rep.item_iv);
  }
  SUBCASE("sublinear growth holds for any positive slope") {
    CHECK(momentum_condition_check(GNSchedule{1.0, 1.0, 0.5}, horizon).holds());
    CHECK(momentum_condition_check(GNSchedule{3.0, 2.0, 0.25}, horizon).holds());
  }
  SUBCASE("linear growth with slope 1 fails the gap inequality") {
    const auto rep = momentum_condition_check(GNSchedule{1.0, 1.0, 1.0}, horizon);
    CHECK_FALSE(rep.item_ii);
    CHECK_FALSE(rep.gap_positive_tail);
    CHECK_FALSE(rep.holds());
    CHECK(rep.item_i);
    CHECK(rep.item_iii);
  }
  SUBCASE("the boundary slope 1/2 fails through ratio growth") {
    const auto rep = momentum_condition_check(GNSchedule{0.5, 1.0, 1.0}, horizon);
    CHECK(rep.gap_positive_tail);  // gap stays at a positive constant
    CHECK_FALSE(rep.item_ii);      // but the witness ratio diverges
  }
  SUBCASE("classic momentum fails only the strict gap inequality") {
    const auto rep = momentum_condition_check(NesterovSchedule{}, horizon);
    CHECK(rep.item_i);
    CHECK_FALSE(rep.item_ii);
    CHECK(rep.item_iii);
    CHECK(rep.item_iv);
    CHECK_FALSE(rep.holds());
  }
  SUBCASE("summaries state the verdict") {
    const auto good = momentum_condition_check(GNSchedule{0.125, 1.0, 1.0}, 1000);
    CHECK(good.summary().find("holds") != std::string::npos);
    const auto bad = momentum_condition_check(GNSchedule{1.0, 1.0, 1.0}, 1000);
    CHECK(bad.summary().find("fails") != std::string::npos);
  }
  SUBCASE("tiny horizons are rejected") {
    CHECK_THROWS_AS(momentum_condition_check(GNSchedule{}, 5), std::invalid_argument);
  }
}
