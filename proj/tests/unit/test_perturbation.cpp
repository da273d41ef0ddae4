#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "random_fns.hpp"
#include "slgap/errors.hpp"
#include "slgap/perturbation.hpp"

using namespace slgap;
using std::numbers::pi;

namespace {
const Interval kUnit(0.0, pi);
Problem free_string() { return Problem(PiecewiseFn::constant(kUnit, 0.0), PiecewiseFn::constant(kUnit, 1.0)); }
}  // namespace

TEST_SUITE("perturbation") {
  TEST_CASE("uniform potential shift") {
    Problem p(PiecewiseFn::step(kUnit, 1.3, 0.0, 40.0), PiecewiseFn::constant(kUnit, 1.0));
    auto pair = solve_pair(p, Mesh(kUnit, 1024));
    auto dir = PerturbationDirection::potential_only(PiecewiseFn::constant(kUnit, 1.0));
    CHECK(eigenvalue_derivative(pair, dir, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eigenvalue_derivative(pair, dir, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(gap_derivative(pair, dir)) < 1e-12);
  }

  TEST_CASE("weight scaling") {
    auto p = free_string();
    auto pair = solve_pair(p, Mesh(kUnit, 2048));
    auto dir = PerturbationDirection::density_only(p.w());
    CHECK(eigenvalue_derivative(pair, dir, 1) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(eigenvalue_derivative(pair, dir, 2) == doctest::Approx(-4.0).epsilon(1e-9));
    CHECK(gap_derivative(pair, dir) == doctest::Approx(-3.0).epsilon(1e-9));
  }

  TEST_CASE("indicator direction against finite differences") {
    auto p = free_string();
    Mesh mesh(kUnit, 4096);
    auto pair = solve_pair(p, mesh);
    auto dir = PerturbationDirection::potential_only(PiecewiseFn::step(kUnit, 1.0, 0.0, 1.0));
    const double fd = finite_difference_derivative(p, dir, 1, mesh);
    // Closed form: (2/pi) int_1^pi sin^2 x dx.
    const double exact = (2.0 / pi) * (0.5 * (pi - 1.0) + 0.25 * std::sin(2.0));
    CHECK(eigenvalue_derivative(pair, dir, 1) == doctest::Approx(fd).epsilon(1e-5));
    CHECK(eigenvalue_derivative(pair, dir, 1) == doctest::Approx(exact).epsilon(1e-8));
  }

  TEST_CASE("unnormalized pair is rejected") {
    auto pair = solve_pair(free_string(), Mesh(kUnit, 256));
    for (auto& v : pair.u1) v *= 1.01;
    auto dir = PerturbationDirection::potential_only(PiecewiseFn::constant(kUnit, 1.0));
    CHECK_THROWS_AS(eigenvalue_derivative(pair, dir, 1), InputError);
    CHECK_THROWS_AS(eigenvalue_derivative(pair, dir, 3), InputError);
  }

  TEST_CASE("layered derivative agrees with the mesh derivative") {
    Problem p(PiecewiseFn::step(kUnit, 0.8, 0.0, 30.0), PiecewiseFn::step(kUnit, 2.1, 3.0, 1.0));
    auto lp = LayeredProblem::from_problem(p);
    REQUIRE(lp);
    PerturbationDirection dir{PiecewiseFn::step(kUnit, 2.5, 0.0, 1.0), PiecewiseFn::step(kUnit, 0.4, 1.0, 0.0)};
    auto pair = solve_pair(p, Mesh(kUnit, 4096));
    CHECK(gap_derivative(*lp, dir) == doctest::Approx(gap_derivative(pair, dir)).epsilon(1e-7));
  }

  TEST_CASE("property: random piecewise-linear directions") {
    std::mt19937_64 rng(11);
    Problem p(PiecewiseFn::step(kUnit, 1.1, 0.0, 20.0), PiecewiseFn::step(kUnit, 1.9, 2.0, 1.0));
    Mesh mesh(kUnit, 2048);
    auto pair = solve_pair(p, mesh);
    for (int i = 0; i < 5; ++i) {
      PerturbationDirection dir{testing::random_piecewise_linear(rng, kUnit, 5, -1.0, 1.0),
                                testing::random_piecewise_linear(rng, kUnit, 5, -0.2, 0.2)};
      const double a = gap_derivative(pair, dir);
      const double fd = finite_difference_gap_derivative(p, dir, mesh);
      CHECK(std::abs(a - fd) / (1.0 + std::abs(a)) < 1e-4);
    }
  }
}
