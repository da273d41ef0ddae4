// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slgap/crossing.hpp"
#include "slgap/layered.hpp"
#include "slgap/liouville.hpp"
#include "slgap/optimizer.hpp"
#include "slgap/perturbation.hpp"
#include "slgap/sl_solver.hpp"
#include "slgap/step_spectrum.hpp"

using namespace slgap;
using std::numbers::pi;

namespace {

const Interval kUnit(0.0, pi);

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  if (!v.pass) ++failures;
  std::printf("%s criterion %d:%s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, v.detail.str().c_str(), seconds_since(t0));
  std::fflush(stdout);
}

/// Continuous piecewise-linear single-well function: values fall to `floor`
/// at `t` and rise again, all within [floor, top].
PiecewiseFn random_well(std::mt19937_64& rng, double t, double floor, double top, int knots) {
  std::uniform_real_distribution<double> pos(0.0, 1.0), val(floor, top);
  std::vector<double> left, right, lv, rv;
  for (int i = 0; i < knots; ++i) {
    left.push_back(kUnit.a() + (t - kUnit.a()) * pos(rng));
    right.push_back(t + (kUnit.b() - t) * pos(rng));
    lv.push_back(val(rng));
    rv.push_back(val(rng));
  }
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  std::sort(lv.begin(), lv.end(), std::greater<>());
  std::sort(rv.begin(), rv.end());
  std::vector<double> xs{kUnit.a()}, ys{std::max(lv.front(), val(rng))};
  for (int i = 0; i < knots; ++i) {
    xs.push_back(left[i]);
    ys.push_back(lv[i]);
  }
  xs.push_back(t);
  ys.push_back(floor);
  for (int i = 0; i < knots; ++i) {
    xs.push_back(right[i]);
    ys.push_back(rv[i]);
  }
  xs.push_back(kUnit.b());
  ys.push_back(std::max(rv.back(), val(rng)));
  std::vector<double> bx{xs.front()};
  std::vector<std::vector<double>> pieces;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (xs[i + 1] - bx.back() < 1e-3) continue;
    const double x0 = bx.back();
    const double y0 = pieces.empty() ? ys.front() : pieces.back()[0] + pieces.back()[1] * (x0 - bx[bx.size() - 2]);
    pieces.push_back({y0, (ys[i + 1] - y0) / (xs[i + 1] - x0)});
    bx.push_back(xs[i + 1]);
  }
  bx.back() = kUnit.b();
  return PiecewiseFn::from_local(bx, pieces);
}

/// A single-barrier density in [lo, hi]: the reflection of a well.
PiecewiseFn random_barrier(std::mt19937_64& rng, double t, double lo, double hi, int knots) {
  const PiecewiseFn well = random_well(rng, t, 0.0, hi - lo, knots);
  return PiecewiseFn::constant(kUnit, hi) - well;
}

Problem random_sw_sb(std::mt19937_64& rng, int i) {
  std::uniform_real_distribution<double> loc(0.3, pi - 0.3), top(1.0, 80.0), dens(1.0, 4.0);
  const double M = top(rng), nb = dens(rng);
  if (i % 2 == 0) {
    const double a = loc(rng), b = loc(rng);
    const double v1 = M * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return Problem(PiecewiseFn::piecewise_constant({0.0, std::min(a, b), std::max(a, b), pi}, {M, 0.0, v1}),
                   PiecewiseFn::step(kUnit, loc(rng), nb, 1.0));
  }
  return Problem(random_well(rng, loc(rng), 0.0, M, 3), random_barrier(rng, loc(rng), 1.0, nb, 3));
}

}  // namespace

int main() {
  report(1, [](Verdict& v) {
    const Problem p(PiecewiseFn::constant(kUnit, 0.0), PiecewiseFn::constant(kUnit, 1.0));
    const auto t0 = std::chrono::steady_clock::now();
    const double g = gap(p, Mesh(kUnit, 4096));
    const double t = seconds_since(t0);
    v.detail << " gap=" << g << " runtime=" << t << "s";
    v.require(std::abs(g - 3.0) < 1e-8, "|gap - 3| < 1e-8");
    v.require(t < 1.0, "runtime < 1 s");
  });

  report(2, [](Verdict& v) {
    std::mt19937_64 rng(2);
    double shift_err = 0.0, scale_err = 0.0;
    for (double w : {0.5, 1.0, 3.0}) {
      const PiecewiseFn V = random_well(rng, 1.3, 0.0, 30.0, 3);
      const PiecewiseFn W = PiecewiseFn::constant(kUnit, w);
      const double g0 = gap(Problem(V, W), Mesh(kUnit, 4096));
      for (double c : {-7.0, 2.5, 40.0}) {
        const double g1 = gap(Problem(V + PiecewiseFn::constant(kUnit, c), W), Mesh(kUnit, 4096));
        shift_err = std::max(shift_err, std::abs(g1 - g0));
      }
    }
    for (double c : {0.5, 2.0, 7.0}) {
      const auto s = solve(Problem(PiecewiseFn::constant(kUnit, 0.0), PiecewiseFn::constant(kUnit, c)),
                           Mesh(kUnit, 4096), 5);
      for (std::size_t n = 1; n <= 5; ++n)
        scale_err = std::max(scale_err, std::abs(s.lambda[n - 1] - static_cast<double>(n * n) / c));
    }
    v.detail << " max_shift_error=" << shift_err << " max_scale_error=" << scale_err;
    v.require(shift_err < 1e-8, "gap shift invariance within 1e-8");
    v.require(scale_err < 1e-8, "lambda_n = n^2 / c within 1e-8");
  });

  report(3, [](Verdict& v) {
    SearchSpace s;
    s.M = 1e6;
    const auto t0 = std::chrono::steady_clock::now();
    const Optimum o = minimize_step_family(s);
    const double t = seconds_since(t0);
    double trace_min = o.gamma;
    for (const auto& e : o.trace) trace_min = std::min(trace_min, e.gamma);
    v.detail.precision(12);
    v.detail << " gamma=" << o.gamma << " min_trace_gamma=" << trace_min << " runtime=" << t << "s";
    v.require(o.gamma >= 2.04575 && o.gamma <= 2.06, "gamma in [2.04575, 2.06]");
    v.require(trace_min > 2.04575, "every trace iterate > 2.04575");
    v.require(t < 120.0, "runtime < 2 min");
  });

  report(4, [](Verdict& v) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> loc(0.2, pi - 0.2), vm(0.0, 200.0), nb(1.0, 4.0), u(0.0, 1.0);
    double worst = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 100; ++i) {
      StepProblem sp;
      sp.x_minus = loc(rng);
      sp.xhat_minus = loc(rng);
      sp.v_max = vm(rng);
      sp.n_big = nb(rng);
      sp.w_low = 1.0 + (sp.n_big - 1.0) * u(rng);
      sp.reflected = u(rng) < 0.5;
      sp.density_high_first = u(rng) < 0.75;
      const auto e = eigenvalues_step(sp, 2);
      const auto s = solve(sp.problem(), Mesh(sp.interval, 8192), 2);
      for (std::size_t k = 0; k < 2; ++k) worst = std::max(worst, std::abs(e.lambda[k] - s.lambda[k]) / s.lambda[k]);
    }
    const double t = seconds_since(t0);
    v.detail << " max_relative_discrepancy=" << worst << " runtime=" << t << "s";
    v.require(worst < 1e-5, "relative discrepancy < 1e-5");
    v.require(t < 300.0, "runtime < 5 min");
  });

  report(5, [](Verdict& v) {
    std::mt19937_64 rng(5);
    const Problem p(random_well(rng, 1.4, 0.0, 25.0, 3), random_barrier(rng, 1.9, 1.0, 2.5, 3));
    const Mesh mesh(kUnit, 2048);
    const auto pair = solve_pair(p, mesh);
    double worst = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 20; ++i) {
      std::uniform_real_distribution<double> dv(-1.0, 1.0), dw(-0.2, 0.2);
      auto lin = [&](auto& dist) {
        std::vector<double> xs, ys;
        for (int k = 0; k <= 5; ++k) {
          xs.push_back(pi * k / 5.0);
          ys.push_back(dist(rng));
        }
        xs.back() = pi;
        std::vector<std::vector<double>> pieces;
        for (int k = 0; k < 5; ++k) pieces.push_back({ys[k], (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])});
        return PiecewiseFn::from_local(xs, pieces);
      };
      const PerturbationDirection dir{lin(dv), lin(dw)};
      const double a = gap_derivative(pair, dir);
      const double fd = finite_difference_gap_derivative(p, dir, mesh);
      worst = std::max(worst, std::abs(a - fd) / std::abs(fd));
    }
    const double t = seconds_since(t0);
    v.detail << " max_relative_error=" << worst << " runtime=" << t << "s";
    v.require(worst < 1e-4, "relative error < 1e-4");
    v.require(t < 60.0, "runtime < 1 min");
  });

  report(6, [](Verdict& v) {
    std::mt19937_64 rng(6);
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
      const Problem p = random_sw_sb(rng, i);
      const auto pair = solve_pair(p, Mesh(kUnit, 4096));
      const auto r = find_crossings(pair);
      const bool interior = (r.x_minus > kUnit.a() || r.x_plus < kUnit.b()) &&
                            (r.xhat_minus > kUnit.a() || r.xhat_plus < kUnit.b());
      const bool counts = r.crossing_counts[0] >= 1 && r.crossing_counts[0] <= 2 && r.crossing_counts[1] >= 1 &&
                          r.crossing_counts[1] <= 2;
      if (!r.ratio_monotone || !counts || !interior || r.weighted_anomaly) ++violations;
    }
    v.detail << " instances=50 violations=" << violations;
    v.require(violations == 0, "zero violations");
  });

  report(7, [](Verdict& v) {
    const Interval iv(5.0, 6.0);
    const Problem p(PiecewiseFn::from_global({5.0, 6.0}, {{0.0, 0.0, -1.0}}),
                    PiecewiseFn::from_global({5.0, 6.0}, {{0.0, 0.0, 1.0}}));
    const double bound = lavine_bound(p);
    const double g = gap(p, Mesh(iv, 4096));
    const auto eq = eigenvalue_equivalence_check(p, 4096);
    const double gt = eq.transformed[1] - eq.transformed[0];
    const double inv = std::abs(g - gt) / g;
    v.detail.precision(10);
    v.detail << " bound=" << bound << " gap=" << g << " gap_invariance=" << inv;
    v.require(std::abs(bound - 0.978803) <= 1e-5, "bound = 0.978803 +- 1e-5");
    v.require(g >= bound - 1e-6, "gap >= bound - 1e-6");
    v.require(inv < 1e-5, "gap invariance < 1e-5");
  });

  report(8, [](Verdict& v) {
    const std::vector<std::pair<PiecewiseFn, double>> cases{
        {PiecewiseFn::from_global({0.0, pi}, {{1.0, 0.5}}), 2.0},
        {PiecewiseFn::from_global({0.0, pi}, {{1.0, 0.0, 0.2}}), 0.5},
        {PiecewiseFn::from_global({0.0, pi}, {{1.0, 1.0, 0.5, 1.0 / 6.0}}), 10.0},
    };
    double worst_gap = 0.0, worst_res = 0.0;
    for (const auto& [w, c] : cases) {
      const Problem p(constant_psi_potential(w, c), w);
      const double L = liouville_potential(p).L;
      const double g = gap(p, Mesh(kUnit, 4096));
      worst_gap = std::max(worst_gap, std::abs(g - 3.0 * pi * pi / (L * L)));
      worst_res = std::max(worst_res, equality_condition_residual(p));
    }
    v.detail << " max_gap_error=" << worst_gap << " max_residual=" << worst_res;
    v.require(worst_gap < 1e-6, "|gap - 3 pi^2 / L^2| < 1e-6");
    v.require(worst_res < 1e-8, "equality residual < 1e-8");
  });

  report(9, [](Verdict& v) {
    constexpr double kCell = pi / 4096.0;
    int beaten = 0, multi_jump = 0, misplaced = 0;
    double worst_margin = -1e300;
    std::ostringstream where;
    auto check_jumps = [&](const Optimum& o, const char* family) {
      const int before = multi_jump + misplaced;
      const auto jv = count_jumps(o.V_star, 2 * kCell);
      const auto jw = count_jumps(o.w_star, 2 * kCell);
      if (jv.count > 1 || jw.count > 1) {
        ++multi_jump;
        where << " " << family << "(M=" << o.space.M << ",N=" << o.space.n_big << ",gamma=" << o.gamma << ",jumps)";
        return;
      }
      const auto lp = LayeredProblem::from_problem(Problem(o.V_star, o.w_star));
      if (!lp) {
        ++misplaced;
        return;
      }
      const auto cr = find_crossings(lp->mode(lp->eigenvalue(1)), lp->mode(lp->eigenvalue(2)));
      for (double x : jv.locations)
        if (std::min(std::abs(x - cr.x_minus), std::abs(x - cr.x_plus)) >= 2 * kCell) ++misplaced;
      for (double x : jw.locations)
        if (std::min(std::abs(x - cr.xhat_minus), std::abs(x - cr.xhat_plus)) >= 2 * kCell) ++misplaced;
      if (multi_jump + misplaced > before)
        where << " " << family << "(M=" << o.space.M << ",N=" << o.space.n_big << ",gamma=" << o.gamma << ")";
    };
    for (double M : {1.0, 10.0, 100.0})
      for (double nb : {1.0, 2.0, 4.0}) {
        SearchSpace s;
        s.M = M;
        s.n_less = 1.0;
        s.n_big = nb;
        const Optimum step = minimize_step_family(s);
        s.family = Family::monotone_pwc;
        const Optimum pwc = corroborate_monotone_pwc(s, 4);
        worst_margin = std::max(worst_margin, step.gamma - pwc.gamma);
        if (pwc.gamma < step.gamma - 1e-2) ++beaten;
        check_jumps(step, "step");
        check_jumps(pwc, "pwc");
      }
    v.detail << " configs=9 max(step - pwc)=" << worst_margin << " beaten=" << beaten << " multi_jump=" << multi_jump
             << " misplaced_jumps=" << misplaced;
    if (!where.str().empty()) v.detail << " offending:" << where.str();
    v.require(beaten == 0, "pwc never beats step family by more than 1e-2");
    v.require(multi_jump == 0, "optima have at most one jump");
    v.require(misplaced == 0, "jumps within 2 cells of crossings");
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
