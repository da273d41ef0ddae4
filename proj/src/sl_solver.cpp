#include "slgap/sl_solver.hpp"

#include <algorithm>
#include <cmath>

#include "slgap/errors.hpp"
#include "slgap/quadrature.hpp"
#include "slgap/tridiagonal.hpp"

namespace slgap {

namespace {

void require_same_interval(const Interval& a, const Interval& b, const char* what) {
  const double tol = 1e-12 * a.length();
  if (std::abs(a.a() - b.a()) > tol || std::abs(a.b() - b.b()) > tol)
    throw InputError(std::string(what) + " is defined on a different interval");
}

template <class Cmp>
double exact_extreme(const PiecewiseFn& fn, Cmp better) {
  const auto bps = fn.breakpoints();
  double best = fn.eval_piece(0, bps[0]);
  for (std::size_t i = 0; i < fn.piece_count(); ++i) {
    for (double x : {bps[i], bps[i + 1]}) {
      const double v = fn.eval_piece(i, x);
      if (better(v, best)) best = v;
    }
    for (double x : fn.critical_points(i)) {
      const double v = fn.eval_piece(i, x);
      if (better(v, best)) best = v;
    }
  }
  return best;
}

}  // namespace

double exact_min(const PiecewiseFn& fn) { return exact_extreme(fn, std::less<>()); }
double exact_max(const PiecewiseFn& fn) { return exact_extreme(fn, std::greater<>()); }

Problem::Problem(PiecewiseFn V, PiecewiseFn w, std::optional<PiecewiseFn> V0)
    : interval_(V.interval()),
      V_(std::move(V)),
      w_(std::move(w)),
      V0_(V0 ? std::move(*V0) : PiecewiseFn::constant(interval_, 0.0)),
      q_(V_),
      w_min_(0.0) {
  require_same_interval(interval_, w_.interval(), "w");
  require_same_interval(interval_, V0_.interval(), "V0");
  w_min_ = exact_min(w_);
  if (!(w_min_ > 0.0)) throw InputError("density w must be positive on the interval");
  q_ = V_ + V0_;
}

Mesh::Mesh(const Interval& iv, std::size_t n) : iv_(iv), n_(n), h_(iv.length() / static_cast<double>(n + 1)) {
  if (n < kMinNodes) throw InputError("mesh needs at least " + std::to_string(kMinNodes) + " interior nodes");
}

std::vector<double> Mesh::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
  return x;
}

std::vector<double> hat_averages(const PiecewiseFn& fn, const Mesh& mesh) {
  const std::size_t n = mesh.n();
  const double h = mesh.h();
  const double a = mesh.interval().a();
  const double b = mesh.interval().b();
  const auto bps = fn.breakpoints();
  auto grid = [&](std::size_t c) { return c == n + 1 ? b : a + h * static_cast<double>(c); };

  // rise[c] = int_cell f (x - x_c)/h, fall[c] = int_cell f (x_{c+1} - x)/h.
  std::vector<double> rise(n + 1), fall(n + 1);
  std::size_t p = 0;
  for (std::size_t c = 0; c <= n; ++c) {
    const double x0 = grid(c), x1 = grid(c + 1);
    double r = 0.0, f = 0.0;
    double lo = x0;
    while (p + 1 < fn.piece_count() && bps[p + 1] <= lo) ++p;
    for (std::size_t q = p;; ++q) {
      const double hi = std::min(x1, bps[q + 1]);
      if (hi > lo) {
        r += gauss10([&](double x) { return fn.eval_piece(q, x) * (x - x0); }, lo, hi);
        f += gauss10([&](double x) { return fn.eval_piece(q, x) * (x1 - x); }, lo, hi);
      }
      lo = std::max(lo, hi);
      if (q + 1 >= fn.piece_count() || bps[q + 1] >= x1) break;
    }
    rise[c] = r / h;
    fall[c] = f / h;
  }
  std::vector<double> avg(n);
  for (std::size_t i = 0; i < n; ++i) avg[i] = (rise[i] + fall[i + 1]) / h;
  return avg;
}

namespace {

void fix_sign(std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  for (double v : u) {
    if (std::abs(v) > 1e-10 * m) {
      if (v < 0.0)
        for (auto& x : u) x = -x;
      return;
    }
  }
}

DiscreteLevel solve_level(const Problem& p, const Mesh& mesh, std::size_t k) {
  const std::size_t n = mesh.n();
  const double h = mesh.h();
  const double ih2 = 1.0 / (h * h);
  auto q = hat_averages(p.total_potential(), mesh);
  auto w = hat_averages(p.w(), mesh);
  for (double v : w)
    if (!(v > 0.0)) throw SolverError("density average non-positive at a mesh node");

  SymTridiagonal t;
  t.d.resize(n);
  t.e.resize(n - 1);
  std::vector<double> rs(n);
  for (std::size_t i = 0; i < n; ++i) rs[i] = 1.0 / std::sqrt(w[i]);
  for (std::size_t i = 0; i < n; ++i) t.d[i] = (2.0 * ih2 + q[i]) * rs[i] * rs[i];
  for (std::size_t i = 0; i + 1 < n; ++i) t.e[i] = -ih2 * rs[i] * rs[i + 1];

  auto eig = smallest_eigenpairs(t, k);
  DiscreteLevel lvl{mesh, {}, {}, std::move(w)};
  const double scale = 1.0 / std::sqrt(h);
  for (auto& y : eig.vectors) {
    // y = W^{1/2} u with sum y^2 = 1, so sum h w u^2 = 1 after the 1/sqrt(h) factor.
    for (std::size_t i = 0; i < n; ++i) y[i] *= rs[i] * scale;
    fix_sign(y);
    // Rayleigh quotient in difference form: accurate to roundoff in lambda
    // rather than in the matrix norm 4/h^2.
    double kin = 0.0, pot = 0.0, mass = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - prev;
      kin += d * d;
      pot += q[i] * y[i] * y[i];
      mass += lvl.w_avg[i] * y[i] * y[i];
      prev = y[i];
    }
    kin += prev * prev;
    lvl.lambda.push_back((kin * ih2 + pot) / mass);
    lvl.u.push_back(std::move(y));
  }
  return lvl;
}

}  // namespace

Spectrum solve(const Problem& p, const Mesh& mesh, std::size_t k, SolveOptions opt) {
  if (k == 0 || k > 10) throw InputError("eigenpair count k must be in [1, 10]");
  require_same_interval(p.interval(), mesh.interval(), "mesh");
  Spectrum s;
  s.levels.push_back(solve_level(p, mesh, k));
  if (opt.extrapolate) {
    s.levels.push_back(solve_level(p, mesh.refined(), k));
    for (std::size_t i = 0; i < k; ++i)
      s.lambda.push_back((4.0 * s.levels[1].lambda[i] - s.levels[0].lambda[i]) / 3.0);
  } else {
    s.lambda = s.levels[0].lambda;
  }
  for (std::size_t i = 0; i < k; ++i)
    if (!std::isfinite(s.lambda[i])) throw SolverError("eigenvalue not finite");
  return s;
}

SpectralPair solve_pair(const Problem& p, const Mesh& mesh, SolveOptions opt) {
  Spectrum s = solve(p, mesh, 2, opt);
  SpectralPair pair{s.lambda[0], s.lambda[1], s.levels[0].u[0], s.levels[0].u[1], s.mesh(), s.levels[0].w_avg,
                    std::move(s.levels)};
  if (!(pair.lambda1 < pair.lambda2)) throw SolverError("eigenvalues are not simple");
  return pair;
}

double gap(const Problem& p, const Mesh& mesh) {
  const auto s = solve(p, mesh, 2);
  return s.lambda[1] - s.lambda[0];
}

double SpectralPair::weighted_inner(int i, int j) const {
  const auto& a = i == 1 ? u1 : u2;
  const auto& b = j == 1 ? u1 : u2;
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += w_avg[k] * a[k] * b[k];
  return s * mesh.h();
}

double wronskian_residual(const SpectralPair& pair, const Problem& p, WronskianOptions opt) {
  const std::size_t n = pair.mesh.n();
  const double h = pair.mesh.h();
  auto at = [&](const std::vector<double>& u, std::ptrdiff_t i) {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : u[static_cast<std::size_t>(i)];
  };
  // W on half nodes i - 1/2, i = 0..n.
  std::vector<double> W(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const auto l = static_cast<std::ptrdiff_t>(i) - 1, r = static_cast<std::ptrdiff_t>(i);
    W[i] = (at(pair.u1, l) * at(pair.u2, r) - at(pair.u2, l) * at(pair.u1, r)) / h;
  }
  std::vector<double> jumps = p.total_potential().jump_locations();
  for (double x : p.w().jump_locations()) jumps.push_back(x);
  const double guard = static_cast<double>(opt.exclude_cells_near_jumps) * h;
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pair.mesh.node(i);
    bool skip = false;
    if (opt.exclude_cells_near_jumps > 0)
      for (double j : jumps) skip = skip || std::abs(x - j) <= guard;
    if (skip) continue;
    const double dW = (W[i + 1] - W[i]) / h;
    const double rhs = (pair.lambda1 - pair.lambda2) * pair.w_avg[i] * pair.u1[i] * pair.u2[i];
    res = std::max(res, std::abs(dW - rhs));
  }
  return res;
}

}  // namespace slgap
