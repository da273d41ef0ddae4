#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slgap/errors.hpp"
#include "slgap/liouville.hpp"

using namespace slgap;
using std::numbers::pi;

namespace {
Problem quadratic_pair() {
  return Problem(PiecewiseFn::from_global({5.0, 6.0}, {{0.0, 0.0, -1.0}}),
                 PiecewiseFn::from_global({5.0, 6.0}, {{0.0, 0.0, 1.0}}));
}
}  // namespace

TEST_SUITE("liouville") {
  TEST_CASE("identity transform") {
    const Interval iv(0.0, pi);
    const Problem p(PiecewiseFn::constant(iv, 0.0), PiecewiseFn::constant(iv, 1.0));
    const auto d = liouville_potential(p);
    CHECK(d.L == doctest::Approx(pi).epsilon(1e-15));
    for (std::size_t i = 0; i < d.x.size(); i += 97) {
      CHECK(d.psi[i] == 0.0);
      CHECK(d.xi[i] == doctest::Approx(d.x[i]).epsilon(1e-14));
    }
    CHECK(lavine_bound(p) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(equality_condition_residual(p) == 0.0);
    CHECK(eigenvalue_equivalence_check(p).max_relative < 1e-12);
    const auto c = convexity_report(d);
    CHECK(c.convex);
    CHECK(c.min_d2psi == 0.0);
  }

  TEST_CASE("constant coefficients") {
    const Interval iv(0.0, pi);
    const Problem p(PiecewiseFn::constant(iv, 1.0), PiecewiseFn::constant(iv, 4.0));
    const auto d = liouville_potential(p);
    CHECK(d.L == doctest::Approx(2 * pi).epsilon(1e-14));
    CHECK(d.psi[100] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(lavine_bound(p) == doctest::Approx(0.75).epsilon(1e-14));
    const auto e = eigenvalue_equivalence_check(p);
    // lambda_n = (n^2 + 1) / 4.
    CHECK(e.original[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(e.original[1] == doctest::Approx(1.25).epsilon(1e-8));
    CHECK(e.max_relative < 1e-6);
  }

  TEST_CASE("quadratic potential and density") {
    const auto p = quadratic_pair();
    const auto d = liouville_potential(p);
    CHECK(d.L == doctest::Approx(5.5).epsilon(1e-15));
    double psi_err = 0.0, xi_err = 0.0, d2_err = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      const double x = d.x[i];
      psi_err = std::max(psi_err, std::abs(d.psi[i] - (-0.75 / std::pow(x, 4) - 1.0)));
      xi_err = std::max(xi_err, std::abs(d.xi[i] - 0.5 * (x * x - 25.0)));
      // psi_x = 3/x^5, psi_xx = -15/x^6, d2psi/dxi2 = psi_xx/w - psi_x w'/(2 w^2) = -18/x^8.
      d2_err = std::max(d2_err, std::abs(d.d2psi[i] + 18.0 / std::pow(x, 8)));
    }
    CHECK(psi_err < 1e-10);
    CHECK(xi_err < 1e-12);
    CHECK(d2_err < 1e-12);
    CHECK(lavine_bound(p) == doctest::Approx(3 * pi * pi / (5.5 * 5.5)).epsilon(1e-14));
    CHECK_FALSE(convexity_report(d).convex);
    CHECK(equality_condition_residual(p) > 1e-4);
    CHECK(eigenvalue_equivalence_check(p).max_relative < 1e-5);
  }

  TEST_CASE("chain rule matches second differences in xi") {
    const Interval iv(0.0, pi);
    const Problem p(PiecewiseFn::from_global({0.0, pi}, {{0.0, 0.0, 1.0}}),
                    PiecewiseFn::from_global({0.0, pi}, {{1.0, 1.0}}));
    double prev = 0.0;
    for (std::size_t cells : {256u, 512u}) {
      const auto d = liouville_potential(p, cells);
      double err = 0.0;
      for (std::size_t i = 1; i + 1 < d.x.size(); ++i) {
        const double h0 = d.xi[i] - d.xi[i - 1], h1 = d.xi[i + 1] - d.xi[i];
        const double fd = 2.0 * (h0 * d.psi[i + 1] - (h0 + h1) * d.psi[i] + h1 * d.psi[i - 1]) / (h0 * h1 * (h0 + h1));
        err = std::max(err, std::abs(fd - d.d2psi[i]));
      }
      if (prev > 0.0) CHECK(err < 0.3 * prev);
      prev = err;
    }
    CHECK(prev < 1e-3);
  }

  TEST_CASE("linear density: convexity decided by the computed sign") {
    const Problem p(PiecewiseFn::constant(Interval(0.0, pi), 0.0), PiecewiseFn::from_global({0.0, pi}, {{1.0, 1.0}}));
    const auto d = liouville_potential(p);
    // Oracle: second differences of psi on a refined xi-grid.
    const auto f = liouville_potential(p, 16384);
    const auto c = convexity_report(d);
    double fd_min = 1e300, fd_at = 0.0;
    for (std::size_t i = 1; i + 1 < f.x.size(); ++i) {
      const double h0 = f.xi[i] - f.xi[i - 1], h1 = f.xi[i + 1] - f.xi[i];
      const double fd = 2.0 * (h0 * f.psi[i + 1] - (h0 + h1) * f.psi[i] + h1 * f.psi[i - 1]) / (h0 * h1 * (h0 + h1));
      fd_min = std::min(fd_min, fd);
      if (std::abs(f.x[i] - c.x_at_min) < 1e-9) fd_at = fd;
    }
    CHECK(c.convex == (fd_min >= -1e-6));
    CHECK(c.min_d2psi == doctest::Approx(fd_at).epsilon(1e-5));
  }

  TEST_CASE("constant psi: equality in the bound") {
    for (const auto& w : {PiecewiseFn::from_global({0.0, pi}, {{1.0, 0.5}}),
                          PiecewiseFn::from_global({0.0, pi}, {{1.0, 0.3, 0.2}}),
                          PiecewiseFn::from_global({5.0, 6.0}, {{0.0, 0.0, 1.0}})}) {
      const Problem p(constant_psi_potential(w, 2.0), w);
      CHECK(equality_condition_residual(p) < 1e-8);
      const auto s = solve(p, Mesh(p.interval(), 4096), 2);
      CHECK(std::abs(s.lambda[1] - s.lambda[0] - lavine_bound(p)) < 1e-6);
      const auto d = liouville_potential(p);
      CHECK(d.psi[d.x.size() / 2] == doctest::Approx(2.0).epsilon(1e-12));
    }
  }

  TEST_CASE("density with a jump is rejected") {
    const Interval iv(0.0, pi);
    const Problem p(PiecewiseFn::constant(iv, 0.0), PiecewiseFn::step(iv, 1.0, 2.0, 1.0));
    CHECK_THROWS_AS(liouville_potential(p), InputError);
    CHECK(lavine_bound(p) > 0.0);
    const Problem kink(PiecewiseFn::constant(iv, 0.0),
                       PiecewiseFn::from_global({0.0, 1.0, pi}, {{1.0, 1.0}, {2.0, 0.0}}));
    CHECK_THROWS_AS(liouville_potential(kink), InputError);
  }
}
