#include "slgap/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "slgap/errors.hpp"
#include "slgap/jet.hpp"
#include "slgap/quadrature.hpp"

namespace slgap {

namespace {

using J = Jet<5>;

J piece_jet(const PiecewiseFn& f, std::size_t piece, double x) {
  J j;
  double fact = 1.0;
  for (std::size_t k = 0; k < 5; ++k) {
    if (k > 1) fact *= static_cast<double>(k);
    j[k] = f.eval_piece(piece, x, static_cast<int>(k)) / fact;
  }
  return j;
}

struct PsiLocal {
  double psi, dpsi_dx, d2psi_dx2, w, dw;
};

/// psi and its x-derivatives at x from the pieces governing the open cell
/// around `inside`.
PsiLocal psi_at(const PiecewiseFn& q, const PiecewiseFn& w, double inside, double x) {
  const J W = piece_jet(w, w.piece_index(inside), x);
  const J Q = piece_jet(q, q.piece_index(inside), x);
  const J W1 = W.differentiated();
  const J W2 = W1.differentiated();
  const J psi = W2 / (4.0 * W * W) - 5.0 * W1 * W1 / (16.0 * W * W * W) + Q / W;
  return {psi.value(), psi.derivative(1), psi.derivative(2), W.value(), W.derivative(1)};
}

double xi_derivative(const PsiLocal& p) { return p.dpsi_dx / std::sqrt(p.w); }
double xi_second_derivative(const PsiLocal& p) {
  return p.d2psi_dx2 / p.w - p.dpsi_dx * p.dw / (2.0 * p.w * p.w);
}

std::vector<double> x_nodes(const Problem& p, std::size_t cells) {
  const Interval iv = p.interval();
  std::vector<double> x;
  for (std::size_t i = 0; i <= cells; ++i)
    x.push_back(iv.a() + iv.length() * static_cast<double>(i) / static_cast<double>(cells));
  for (const PiecewiseFn* f : {&p.total_potential(), &p.w()})
    for (double b : f->breakpoints()) x.push_back(b);
  std::sort(x.begin(), x.end());
  const double tol = 1e-13 * iv.length();
  std::vector<double> out;
  for (double v : x)
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  out.back() = iv.b();
  return out;
}

double sqrt_w_integral(const PiecewiseFn& w, double x0, double x1) {
  return gauss10([&](double t) { return std::sqrt(w(t)); }, x0, x1);
}

}  // namespace

LiouvilleData liouville_potential(const Problem& p, std::size_t cells) {
  if (cells < 2) throw InputError("Liouville grid needs at least 2 cells");
  const PiecewiseFn& w = p.w();
  const PiecewiseFn& q = p.total_potential();
  if (!w.is_smooth(2)) throw InputError("Liouville transform unavailable: w not C^2");
  if (!(p.w_min() > 0.0)) throw InputError("Liouville transform needs w > 0");

  LiouvilleData d{p.interval(), 0.0, x_nodes(p, cells), {}, {}, {}, {}, {}, PiecewiseFn::constant(Interval(0, 1), 0)};
  const std::size_t n = d.x.size();
  d.xi.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) d.xi[i] = d.xi[i - 1] + sqrt_w_integral(w, d.x[i - 1], d.x[i]);
  d.L = d.xi.back();

  // Nodal values: left-continuous, except at a.
  for (std::size_t i = 0; i < n; ++i) {
    const double inside = i == 0 ? 0.5 * (d.x[0] + d.x[1]) : 0.5 * (d.x[i - 1] + d.x[i]);
    const PsiLocal v = psi_at(q, w, inside, d.x[i]);
    d.psi.push_back(v.psi);
    d.dpsi_dx.push_back(v.dpsi_dx);
    d.dpsi.push_back(xi_derivative(v));
    d.d2psi.push_back(xi_second_derivative(v));
  }

  // Hermite cubic per cell from one-sided data of the cell's own pieces.
  std::vector<std::vector<double>> pieces;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (d.x[i] + d.x[i + 1]);
    const PsiLocal l = psi_at(q, w, mid, d.x[i]);
    const PsiLocal r = psi_at(q, w, mid, d.x[i + 1]);
    const double h = d.xi[i + 1] - d.xi[i];
    const double m0 = xi_derivative(l), m1 = xi_derivative(r);
    const double slope = (r.psi - l.psi) / h;
    pieces.push_back({l.psi, m0, (3.0 * slope - 2.0 * m0 - m1) / h, (m0 + m1 - 2.0 * slope) / (h * h)});
  }
  d.psi_of_xi = PiecewiseFn::from_local(d.xi, std::move(pieces));
  return d;
}

EquivalenceReport eigenvalue_equivalence_check(const Problem& p, std::size_t mesh_n) {
  const LiouvilleData d = liouville_potential(p);
  const Interval tiv(0.0, d.L);
  const Problem t(d.psi_of_xi, PiecewiseFn::constant(tiv, 1.0));
  const auto so = solve(p, Mesh(p.interval(), mesh_n), 2);
  const auto st = solve(t, Mesh(tiv, mesh_n), 2);
  EquivalenceReport r{{so.lambda[0], so.lambda[1]}, {st.lambda[0], st.lambda[1]}, 0.0};
  for (std::size_t k = 0; k < 2; ++k)
    r.max_relative = std::max(r.max_relative, std::abs(r.original[k] - r.transformed[k]) / std::abs(r.original[k]));
  return r;
}

ConvexityReport convexity_report(const LiouvilleData& data) {
  ConvexityReport r{true, std::numeric_limits<double>::infinity(), data.interval.a()};
  for (std::size_t i = 1; i + 1 < data.x.size(); ++i)
    if (data.d2psi[i] < r.min_d2psi) {
      r.min_d2psi = data.d2psi[i];
      r.x_at_min = data.x[i];
    }
  if (data.x.size() < 3) r.min_d2psi = 0.0;
  r.convex = r.min_d2psi >= -1e-10;
  return r;
}

double lavine_bound(const Problem& p) {
  const PiecewiseFn& w = p.w();
  const auto bps = w.breakpoints();
  double L = 0.0;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    constexpr int kSub = 16;
    const double h = (bps[i + 1] - bps[i]) / kSub;
    for (int j = 0; j < kSub; ++j) {
      const double x0 = bps[i] + h * j, x1 = j + 1 == kSub ? bps[i + 1] : x0 + h;
      L += gauss10([&](double t) { return std::sqrt(w.eval_piece(i, t)); }, x0, x1);
    }
  }
  return 3.0 * std::numbers::pi * std::numbers::pi / (L * L);
}

double equality_condition_residual(const Problem& p, std::size_t cells) {
  const LiouvilleData d = liouville_potential(p, cells);
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < d.x.size(); ++i) r = std::max(r, std::abs(d.dpsi_dx[i]));
  return r;
}

PiecewiseFn constant_psi_potential(const PiecewiseFn& w, double c, std::size_t splits) {
  constexpr std::size_t kTerms = PiecewiseFn::kMaxDegree + 1;
  using T = Jet<kTerms + 2>;
  if (splits == 0) throw InputError("constant_psi_potential needs at least one split");
  const auto bps = w.breakpoints();
  std::vector<double> out_bps{bps.front()};
  std::vector<std::vector<double>> pieces;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double h = (bps[i + 1] - bps[i]) / static_cast<double>(splits);
    for (std::size_t j = 0; j < splits; ++j) {
      const double x0 = bps[i] + h * static_cast<double>(j);
      T W;
      double fact = 1.0;
      for (std::size_t k = 0; k < kTerms + 2; ++k) {
        if (k > 1) fact *= static_cast<double>(k);
        W[k] = w.eval_piece(i, x0, static_cast<int>(k)) / fact;
      }
      if (!(W.value() > 0.0)) throw InputError("constant_psi_potential needs w > 0");
      const T W1 = W.differentiated();
      const T W2 = W1.differentiated();
      const T V = c * W - W2 / (4.0 * W) + 5.0 * W1 * W1 / (16.0 * W * W);
      std::vector<double> coef(kTerms);
      for (std::size_t k = 0; k < kTerms; ++k) coef[k] = V[k];
      pieces.push_back(std::move(coef));
      out_bps.push_back(j + 1 == splits ? bps[i + 1] : x0 + h);
    }
  }
  return PiecewiseFn::from_local(std::move(out_bps), std::move(pieces));
}

}  // namespace slgap
