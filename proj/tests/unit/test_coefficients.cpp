#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slgap/coefficients.hpp"
#include "slgap/errors.hpp"

using namespace slgap;
using std::numbers::pi;

namespace {
const Interval kUnit(0.0, pi);

// Degree-15 Taylor polynomial of sin about 0, accurate to ~1e-6 on [0, pi].
PiecewiseFn sine_poly() {
  std::vector<double> c(16, 0.0);
  double f = 1.0;
  for (int k = 1; k <= 15; k += 2) {
    c[k] = ((k / 2) % 2 == 0 ? 1.0 : -1.0) / f;
    f *= (k + 1) * (k + 2);
  }
  return PiecewiseFn::from_global({0.0, pi}, {c});
}
}  // namespace

TEST_SUITE("coefficients") {
  TEST_CASE("interval invariants") {
    CHECK_THROWS_AS(Interval(1.0, 1.0), InputError);
    CHECK_THROWS_AS(Interval(2.0, 1.0), InputError);
    CHECK_THROWS_AS(Interval(0.0, INFINITY), InputError);
    Interval iv(5.0, 6.0);
    CHECK(iv.length() == 1.0);
    CHECK(iv.contains(5.5));
  }

  TEST_CASE("breakpoint and piece validation") {
    CHECK_THROWS_AS(PiecewiseFn::from_global({0.0, 1.0, 1.0}, {{1.0}, {2.0}}), InputError);
    CHECK_THROWS_AS(PiecewiseFn::from_global({0.0, 1.0}, {{1.0}, {2.0}}), InputError);
    CHECK_THROWS_AS(PiecewiseFn::from_global({0.0, 1.0}, {std::vector<double>(18, 1.0)}), InputError);
  }

  TEST_CASE("eval of a step and a quadratic") {
    auto step = PiecewiseFn::step(kUnit, 1.0, 0.0, 5.0);
    CHECK(step(0.5) == 0.0);
    CHECK(step(2.0) == 5.0);
    // Left-continuous at the jump.
    CHECK(step(1.0) == 0.0);
    CHECK(step.right_limit(1.0) == 5.0);
    auto sq = PiecewiseFn::from_global({5.0, 6.0}, {{0.0, 0.0, 1.0}});
    CHECK(sq(5.5) == doctest::Approx(30.25).epsilon(1e-15));
    CHECK_THROWS_AS(sq(4.0), InputError);
    CHECK_THROWS_AS(sq(6.5), InputError);
  }

  TEST_CASE("global and local bases agree") {
    auto g = PiecewiseFn::from_global({1.0, 2.0, 4.0}, {{1.0, -2.0, 0.5, 0.25}, {3.0, 0.0, -1.0}});
    for (double x : {1.0, 1.3, 2.0, 2.5, 3.9}) {
      const double expect = x <= 2.0 ? 1.0 - 2.0 * x + 0.5 * x * x + 0.25 * x * x * x : 3.0 - x * x;
      CHECK(g(x) == doctest::Approx(expect).epsilon(1e-13));
    }
    CHECK(g.derivative(2.5) == doctest::Approx(-5.0));
    CHECK(g.derivative(1.5, 2) == doctest::Approx(1.0 + 1.5 * 1.5));
  }

  TEST_CASE("integral, refinement and reflection") {
    auto f = PiecewiseFn::from_global({0.0, 1.0, 3.0}, {{0.0, 0.0, 3.0}, {2.0, 1.0}});
    // int_0^1 3x^2 + int_1^3 (2 + x) = 1 + 8.
    CHECK(f.integral() == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(f.integral(0.5, 2.0) == doctest::Approx(0.875 + 3.5).epsilon(1e-14));
    std::vector<double> extra{0.25, 2.0};
    auto r = f.refined(extra);
    CHECK(r.piece_count() == 4);
    for (double x : {0.1, 0.6, 1.5, 2.7}) CHECK(r(x) == doctest::Approx(f(x)).epsilon(1e-14));
    auto m = f.reflected();
    for (double x : {0.1, 0.6, 1.5, 2.7}) CHECK(m(3.0 - x) == doctest::Approx(f(x)).epsilon(1e-13));
  }

  TEST_CASE("arithmetic merges breakpoints") {
    auto f = PiecewiseFn::step(kUnit, 1.0, 0.0, 5.0);
    auto g = PiecewiseFn::from_global({0.0, 2.0, pi}, {{0.0, 1.0}, {1.0}});
    auto s = f + 2.0 * g;
    CHECK(s.piece_count() == 3);
    CHECK(s(0.5) == doctest::Approx(1.0));
    CHECK(s(1.5) == doctest::Approx(8.0));
    CHECK(s(3.0) == doctest::Approx(7.0));
    CHECK((s - s).max_abs() == 0.0);
  }

  TEST_CASE("jump and smoothness detection") {
    auto f = PiecewiseFn::step(kUnit, 1.0, 0.0, 5.0);
    CHECK(f.jump_locations() == std::vector<double>{1.0});
    CHECK_FALSE(f.is_smooth(0));
    auto g = PiecewiseFn::from_global({0.0, 1.0, 2.0}, {{0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}});
    CHECK(g.jump_locations().empty());
    CHECK(g.is_smooth(3));
  }

  TEST_CASE("critical points of cubic and high-degree pieces") {
    auto c = PiecewiseFn::from_global({-2.0, 2.0}, {{0.0, -3.0, 0.0, 1.0}});
    auto cp = c.critical_points(0);
    REQUIRE(cp.size() == 2);
    CHECK(cp[0] == doctest::Approx(-1.0));
    CHECK(cp[1] == doctest::Approx(1.0));
    auto s = sine_poly();
    auto sp = s.critical_points(0);
    REQUIRE(sp.size() == 1);
    CHECK(sp[0] == doctest::Approx(pi / 2).epsilon(1e-5));
  }

  TEST_CASE("single-well examples") {
    CHECK(validate_single_well(PiecewiseFn::constant(kUnit, 0.0), 0.3, 1.0).ok());
    CHECK(validate_single_well(PiecewiseFn::constant(kUnit, 0.0), pi, 1.0).ok());
    CHECK(validate_single_well(PiecewiseFn::step(kUnit, 1.0, 0.0, 5.0), 1.0, 5.0).ok());
    auto bad = validate_single_well(sine_poly(), pi / 2, 1.0);
    CHECK_FALSE(bad.ok());
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(bad.violations.front().x < pi / 2);
    CHECK_THROWS_AS(validate_single_well(PiecewiseFn::constant(kUnit, 0.0), 4.0, 1.0), InputError);
  }

  TEST_CASE("single-well bounds are enforced") {
    auto r = validate_single_well(PiecewiseFn::step(kUnit, 1.0, 0.0, 5.0), 1.0, 4.0);
    CHECK_FALSE(r.ok());
    auto neg = validate_single_well(PiecewiseFn::constant(kUnit, -1.0), 1.0, 4.0);
    CHECK_FALSE(neg.ok());
  }

  TEST_CASE("single-barrier examples") {
    CHECK(validate_single_barrier(PiecewiseFn::constant(kUnit, 1.0), 1.0, 1.0, 1.0).ok());
    auto sq = PiecewiseFn::from_global({5.0, 6.0}, {{0.0, 0.0, 1.0}});
    CHECK(validate_single_barrier(sq, 6.0, 25.0, 36.0).ok());
    auto vee = PiecewiseFn::from_global({0.0, pi / 2, pi}, {{pi / 2, -1.0}, {-pi / 2, 1.0}});
    CHECK_FALSE(validate_single_barrier(vee, pi / 2, 0.0 + 1e-3, 2.0).ok());
    CHECK_THROWS_AS(validate_single_barrier(sq, 6.0, 0.0, 36.0), InputError);
  }

  TEST_CASE("transition search") {
    auto vee = PiecewiseFn::from_global({0.0, pi / 2, pi}, {{pi / 2, -1.0}, {-pi / 2, 1.0}});
    auto r = find_single_well(vee, 2.0);
    REQUIRE(r.ok());
    CHECK(r.spec->transition == doctest::Approx(pi / 2));
    CHECK_FALSE(find_single_barrier(vee, 0.0 + 1e-3, 2.0).ok());
  }

  TEST_CASE("validation is exact at breakpoints") {
    // A dip confined to one grid cell is caught through the breakpoint samples.
    auto f = PiecewiseFn::piecewise_constant({0.0, 1.0, 1.0 + 1e-7, pi}, {1.0, 0.5, 1.0});
    CHECK_FALSE(validate_single_barrier(f, 0.0, 0.1, 2.0).ok());
    CHECK(validate_single_well(f, 1.0 + 5e-8, 2.0).ok());
  }

  TEST_CASE("property: step round trip through validation") {
    for (int i = 1; i < 20; ++i) {
      const double x = pi * i / 20.0;
      auto V = PiecewiseFn::step(kUnit, x, 0.0, 3.0 * i);
      auto w = PiecewiseFn::step(kUnit, pi - x, 4.0, 1.5);
      CHECK(find_single_well(V, 3.0 * i).ok());
      CHECK(find_single_barrier(w, 1.0, 4.0).ok());
      CHECK(validate_single_well(V, x, 3.0 * i).ok());
      CHECK(validate_single_barrier(w, pi - x, 1.0, 4.0).ok());
    }
  }
}
