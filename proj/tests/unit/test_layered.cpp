#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slgap/layered.hpp"

using namespace slgap;
using std::numbers::pi;

TEST_SUITE("layered") {
  TEST_CASE("free string eigenvalues and modes") {
    LayeredProblem lp({0.0, pi}, {0.0}, {1.0});
    for (std::size_t k = 1; k <= 6; ++k)
      CHECK(lp.eigenvalue(k) == doctest::Approx(double(k * k)).epsilon(1e-14));
    CHECK(lp.count_below(3.9) == 1);
    CHECK(lp.count_below(4.1) == 2);
    auto m2 = lp.mode(lp.eigenvalue(2));
    const double c = std::sqrt(2.0 / pi);
    for (double x : {0.1, 0.7, 1.5, 2.9}) CHECK(m2(x) == doctest::Approx(c * std::sin(2 * x)).epsilon(1e-12));
    CHECK(m2.derivative(0.0) == doctest::Approx(2 * c).epsilon(1e-12));
  }

  TEST_CASE("constant levels scale and shift") {
    LayeredProblem lp({0.0, 1.0, pi}, {3.0, 3.0}, {4.0, 4.0});
    CHECK(lp.eigenvalue(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp.eigenvalue(3) == doctest::Approx(3.0).epsilon(1e-14));
  }

  TEST_CASE("agrees with the matrix solver on a step") {
    Problem p(PiecewiseFn::step(Interval(0.0, pi), 1.0, 0.0, 100.0),
              PiecewiseFn::step(Interval(0.0, pi), 1.7, 2.0, 1.0));
    auto lp = LayeredProblem::from_problem(p);
    REQUIRE(lp.has_value());
    CHECK(lp->layers().size() == 3);
    auto s = solve(p, Mesh(p.interval(), 4096), 3);
    for (std::size_t k = 1; k <= 3; ++k) CHECK(lp->eigenvalue(k) == doctest::Approx(s.lambda[k - 1]).epsilon(1e-8));
    auto pair = solve_pair(p, Mesh(p.interval(), 4096));
    auto mode = lp->mode(lp->eigenvalue(2));
    double err = 0.0;
    for (std::size_t i = 0; i < pair.mesh.n(); ++i) err = std::max(err, std::abs(mode(pair.mesh.node(i)) - pair.u2[i]));
    CHECK(err < 1e-4);
    CHECK(mode.weighted_integral(p.w()) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("deep barrier without overflow") {
    LayeredProblem lp({0.0, 0.05, pi}, {0.0, 1e6}, {1.0, 1.0});
    const double l1 = lp.eigenvalue(1), l2 = lp.eigenvalue(2);
    CHECK(std::isfinite(l1));
    CHECK(l2 > l1);
    auto m = lp.mode(l1);
    CHECK(m.weighted_integral(lp.density()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m(3.0)) < 1e-100);
  }

  TEST_CASE("derivative matches difference quotient") {
    LayeredProblem base({0.0, 1.0, 2.0, pi}, {0.0, 5.0, 5.0}, {2.0, 2.0, 1.0});
    auto dw = PiecewiseFn::piecewise_constant({0.0, 1.5, pi}, {0.2, -0.1});
    auto mode = base.mode(base.eigenvalue(2));
    const double d = LayeredProblem::eigenvalue_derivative(mode, PiecewiseFn::piecewise_constant({0.0, 1.5, pi}, {1.0, 0.0}), dw);
    auto shifted = [&](double e) {
      LayeredProblem p({0.0, 1.0, 1.5, 2.0, pi}, {e, 5.0 + e, 5.0, 5.0}, {2.0 + 0.2 * e, 2.0 + 0.2 * e, 2.0 - 0.1 * e, 1.0 - 0.1 * e});
      return p.eigenvalue(2);
    };
    const double e = 1e-5;
    CHECK(d == doctest::Approx((shifted(e) - shifted(-e)) / (2 * e)).epsilon(1e-7));
  }
}
