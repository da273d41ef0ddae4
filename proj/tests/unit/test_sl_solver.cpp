#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "slgap/errors.hpp"
#include "slgap/sl_solver.hpp"

using namespace slgap;
using std::numbers::pi;

namespace {
const Interval kUnit(0.0, pi);

Problem constant_problem(double V, double w, Interval iv = kUnit) {
  return Problem(PiecewiseFn::constant(iv, V), PiecewiseFn::constant(iv, w));
}

std::size_t sign_changes(const std::vector<double>& u) {
  std::size_t c = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if ((u[i - 1] < 0.0) != (u[i] < 0.0)) ++c;
  return c;
}
}  // namespace

TEST_SUITE("sl_solver") {
  TEST_CASE("free string") {
    auto s = solve(constant_problem(0.0, 1.0), Mesh(kUnit, 4096), 3);
    CHECK(s.lambda[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.lambda[1] == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(s.lambda[2] == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(std::abs(gap(constant_problem(0.0, 1.0), Mesh(kUnit, 4096)) - 3.0) < 1e-8);
  }

  TEST_CASE("constant shift and weight scaling") {
    auto s = solve(constant_problem(2.5, 1.0), Mesh(kUnit, 1024), 2);
    CHECK(s.lambda[0] == doctest::Approx(3.5).epsilon(1e-10));
    CHECK(s.lambda[1] == doctest::Approx(6.5).epsilon(1e-10));
    CHECK(std::abs(gap(constant_problem(17.0, 1.0), Mesh(kUnit, 1024)) - 3.0) < 1e-8);
    auto w4 = solve(constant_problem(0.0, 4.0), Mesh(kUnit, 1024), 2);
    CHECK(std::abs(w4.lambda[0] - 0.25) < 1e-10);
    CHECK(std::abs(w4.lambda[1] - 1.0) < 1e-10);
  }

  TEST_CASE("background potential adds to V") {
    Problem p(PiecewiseFn::constant(kUnit, 1.0), PiecewiseFn::constant(kUnit, 1.0),
              PiecewiseFn::constant(kUnit, 2.0));
    auto s = solve(p, Mesh(kUnit, 512), 2);
    CHECK(s.lambda[0] == doctest::Approx(4.0).epsilon(1e-9));
  }

  TEST_CASE("input errors") {
    CHECK_THROWS_AS(Mesh(kUnit, 10), InputError);
    CHECK_THROWS_AS(constant_problem(0.0, 0.0), InputError);
    CHECK_THROWS_AS(Problem(PiecewiseFn::constant(kUnit, 0.0),
                            PiecewiseFn::from_global({0.0, pi}, {{-1.0, 1.0}})),
                    InputError);
    CHECK_THROWS_AS(solve(constant_problem(0.0, 1.0), Mesh(kUnit, 128), 11), InputError);
    CHECK_THROWS_AS(solve(constant_problem(0.0, 1.0), Mesh(Interval(0.0, 1.0), 128), 2), InputError);
  }

  TEST_CASE("hat averages are exact for polynomials") {
    Mesh m(Interval(0.0, 1.0), 99);
    auto f = PiecewiseFn::from_global({0.0, 1.0}, {{0.0, 0.0, 1.0}});
    auto avg = hat_averages(f, m);
    // (1/h) int hat * x^2 = x_i^2 + h^2/6.
    for (std::size_t i = 0; i < m.n(); ++i)
      CHECK(avg[i] == doctest::Approx(m.node(i) * m.node(i) + m.h() * m.h() / 6.0).epsilon(1e-13));
    // A jump inside a cell splits the average by the exact hat mass.
    auto step = PiecewiseFn::step(Interval(0.0, 1.0), 0.5025, 0.0, 1.0);
    auto sa = hat_averages(step, m);
    // Node 49 sits at 0.50, node 50 at 0.51; the jump lies at theta = 1/4 of the cell.
    CHECK(sa[49] == doctest::Approx(0.5 * 0.75 * 0.75).epsilon(1e-12));
    CHECK(sa[50] == doctest::Approx(1.0 - 0.5 * 0.25 * 0.25).epsilon(1e-12));
  }

  TEST_CASE("normalization, orthogonality and sign convention") {
    Problem p(PiecewiseFn::step(kUnit, 1.0, 0.0, 100.0), PiecewiseFn::step(kUnit, 2.0, 2.0, 1.0));
    auto pair = solve_pair(p, Mesh(kUnit, 2048));
    CHECK(std::abs(pair.weighted_inner(1, 1) - 1.0) < 1e-8);
    CHECK(std::abs(pair.weighted_inner(2, 2) - 1.0) < 1e-8);
    CHECK(std::abs(pair.weighted_inner(1, 2)) < 1e-8);
    CHECK(sign_changes(pair.u1) == 0);
    CHECK(pair.u1.front() > 0.0);
    CHECK(sign_changes(pair.u2) == 1);
    CHECK(pair.u2.front() > 0.0);
  }

  TEST_CASE("second-order convergence for smooth coefficients") {
    // -u'' + x u = lambda u: compare unextrapolated errors against the extrapolated value.
    Problem p(PiecewiseFn::from_global({0.0, pi}, {{0.0, 1.0}}), PiecewiseFn::constant(kUnit, 1.0));
    const double ref = solve(p, Mesh(kUnit, 4096), 1).lambda[0];
    const double e1 = solve(p, Mesh(kUnit, 255), 1, {.extrapolate = false}).lambda[0] - ref;
    const double e2 = solve(p, Mesh(kUnit, 511), 1, {.extrapolate = false}).lambda[0] - ref;
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(1e-2));
    CHECK(std::abs(solve(p, Mesh(kUnit, 2048), 1).lambda[0] - ref) < 1e-8);
  }

  TEST_CASE("extrapolation is regular across an off-node jump") {
    // Extrapolated values on nested meshes agree far better than either
    // raw value, whichever cell fraction the jump occupies.
    for (double x : {1.0, 1.2345, 2.0}) {
      Problem p(PiecewiseFn::step(kUnit, x, 0.0, 100.0), PiecewiseFn::constant(kUnit, 1.0));
      auto a = solve(p, Mesh(kUnit, 2048), 2);
      auto b = solve(p, Mesh(kUnit, 4097), 2);
      const double raw = std::abs(a.levels[0].lambda[1] - a.lambda[1]);
      CHECK(std::abs(a.lambda[1] - b.lambda[1]) < 5e-2 * raw);
    }
  }

  TEST_CASE("wronskian residual") {
    auto p = constant_problem(0.0, 1.0);
    auto r1 = wronskian_residual(solve_pair(p, Mesh(kUnit, 2048)), p);
    CHECK(r1 < 1e-3);
    auto r2 = wronskian_residual(solve_pair(p, Mesh(kUnit, 4097)), p);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
    Problem step(PiecewiseFn::step(kUnit, 1.0, 0.0, 100.0), PiecewiseFn::constant(kUnit, 1.0));
    CHECK(wronskian_residual(solve_pair(step, Mesh(kUnit, 2048)), step, {.exclude_cells_near_jumps = 2}) < 1e-2);
  }

  TEST_CASE("baseline runtime") {
    const auto t0 = std::chrono::steady_clock::now();
    (void)gap(constant_problem(0.0, 1.0), Mesh(kUnit, 4096));
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    CHECK(dt.count() < 1.0);
  }
}
