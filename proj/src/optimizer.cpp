#include "slgap/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <tuple>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "slgap/crossing.hpp"
#include "slgap/errors.hpp"
#include "slgap/layered.hpp"
#include "slgap/parallel.hpp"
#include "slgap/perturbation.hpp"

namespace slgap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Newton polish stops below this gain in log gamma.
constexpr double kLogGain = 1e-10;

struct Point {
  double x;
  double f;
};

/// Best point on [lo, hi] from a uniform plus end-clustered scan refined by
/// Brent on the bracket of the best sample. Never worse than (x0, f0).
template <class F>
Point line_min(F&& f, double lo, double hi, double x0, double f0, const OptimizerOptions& o) {
  if (!(hi > lo)) return {x0, f0};
  const double span = hi - lo;
  std::vector<double> xs;
  const std::size_t n = std::max<std::size_t>(o.linear_samples, 2);
  for (std::size_t i = 0; i <= n; ++i) xs.push_back(lo + span * static_cast<double>(i) / static_cast<double>(n));
  const std::size_t g = o.geometric_samples;
  for (std::size_t j = 0; j < g; ++j) {
    const double r = 0.25 * std::pow(4e-6, g > 1 ? static_cast<double>(j) / static_cast<double>(g - 1) : 1.0);
    xs.push_back(lo + span * r);
    xs.push_back(hi - span * r);
  }
  xs.push_back(x0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> fs(xs.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fs[i] = xs[i] == x0 ? f0 : f(xs[i]);
    if (fs[i] < fs[best]) best = i;
  }
  Point out{x0, f0};
  if (fs[best] < out.f) out = {xs[best], fs[best]};

  const double l = xs[best == 0 ? 0 : best - 1];
  const double r = xs[std::min(best + 1, xs.size() - 1)];
  if (r > l) {
    std::uintmax_t iters = 80;
    const auto [xm, fm] = boost::math::tools::brent_find_minima(
        [&](double x) {
          const double v = f(x);
          return std::isfinite(v) ? v : std::numeric_limits<double>::max();
        },
        l, r, 40, iters);
    if (fm < out.f) out = {xm, fm};
  }
  return out;
}

/// Cholesky solve of (H + mu diag) d = -g after Jacobi scaling; false if no
/// shift up to 1e8 makes the matrix positive definite.
bool shifted_newton(std::vector<std::vector<double>> H, const std::vector<double>& g, std::vector<double>& d) {
  const std::size_t n = g.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::abs(H[i][i]) > 0.0 ? 1.0 / std::sqrt(std::abs(H[i][i])) : 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) H[i][j] *= s[i] * s[j];
  for (double mu = 0.0; mu <= 1e8; mu = mu == 0.0 ? 1e-8 : mu * 10.0) {
    std::vector<std::vector<double>> Lc(n, std::vector<double>(n, 0.0));
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double v = H[i][j] + (i == j ? mu : 0.0);
        for (std::size_t k = 0; k < j; ++k) v -= Lc[i][k] * Lc[j][k];
        if (i == j) {
          if (!(v > 1e-14)) {
            ok = false;
            break;
          }
          Lc[i][i] = std::sqrt(v);
        } else {
          Lc[i][j] = v / Lc[j][j];
        }
      }
    if (!ok) continue;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = -g[i] * s[i];
      for (std::size_t k = 0; k < i; ++k) v -= Lc[i][k] * y[k];
      y[i] = v / Lc[i][i];
    }
    d.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      double v = y[i];
      for (std::size_t k = i + 1; k < n; ++k) v -= Lc[k][i] * d[k];
      d[i] = v / Lc[i][i];
    }
    for (std::size_t i = 0; i < n; ++i) d[i] *= s[i];
    return true;
  }
  return false;
}

/// Bounded Newton iteration on the coordinates `active` of p within [lo, hi].
/// Derivatives are central differences on a stencil shifted inside the box;
/// coordinates on a bound with an outward gradient stay fixed. f may update
/// coordinates outside `active` of its argument. Stops after a step gaining
/// less than min_gain. Never increases f.
template <class F, std::size_t N>
void newton_polish(F&& f, std::array<double, N>& p, double& fp, const std::array<double, N>& lo,
                   const std::array<double, N>& hi, const std::vector<std::size_t>& active, std::size_t steps,
                   double min_gain) {
  for (std::size_t it = 0; it < steps; ++it) {
    std::array<double, N> h{}, c = p;
    for (std::size_t i : active) {
      const double span = hi[i] - lo[i];
      const double room = std::min(p[i] - lo[i], hi[i] - p[i]);
      h[i] = 1e-4 * std::max(room, 1e-4 * span);
      c[i] = std::clamp(p[i], lo[i] + h[i], hi[i] - h[i]);
    }
    auto fc_point = c;
    const double fc = f(fc_point);
    const std::size_t n = active.size();
    std::vector<double> g(n), fplus(n), fminus(n);
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
      auto q = c;
      q[active[a]] += h[active[a]];
      fplus[a] = f(q);
      q = c;
      q[active[a]] = c[active[a]] - h[active[a]];
      fminus[a] = f(q);
      g[a] = (fplus[a] - fminus[a]) / (2.0 * h[active[a]]);
      H[a][a] = (fplus[a] - 2.0 * fc + fminus[a]) / (h[active[a]] * h[active[a]]);
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        const std::size_t i = active[a], j = active[b];
        double acc = 0.0;
        for (int si : {1, -1})
          for (int sj : {1, -1}) {
            auto q = c;
            q[i] = c[i] + si * h[i];
            q[j] = c[j] + sj * h[j];
            acc += si * sj * f(q);
          }
        H[a][b] = H[b][a] = acc / (4.0 * h[i] * h[j]);
      }
    if (!std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); })) return;

    std::vector<std::size_t> free;
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t i = active[a];
      const bool pinned_lo = p[i] <= lo[i] && g[a] > 0.0;
      const bool pinned_hi = p[i] >= hi[i] && g[a] < 0.0;
      if (!pinned_lo && !pinned_hi) free.push_back(a);
    }
    if (free.empty()) return;
    std::vector<std::vector<double>> Hf(free.size(), std::vector<double>(free.size()));
    std::vector<double> gf(free.size()), d;
    for (std::size_t a = 0; a < free.size(); ++a) {
      gf[a] = g[free[a]];
      for (std::size_t b = 0; b < free.size(); ++b) Hf[a][b] = H[free[a]][free[b]];
    }
    if (!shifted_newton(Hf, gf, d)) return;
    bool moved = false;
    for (double t = 1.0; t > 1e-6 && !moved; t *= 0.5) {
      auto q = p;
      for (std::size_t a = 0; a < free.size(); ++a) {
        const std::size_t i = active[free[a]];
        q[i] = std::clamp(p[i] + t * d[a], lo[i], hi[i]);
      }
      if (q == p) break;
      const double fq = f(q);
      if (fq < fp) {
        moved = fp - fq > min_gain;
        p = q;
        fp = fq;
      }
    }
    if (!moved) return;
  }
}

/// Local minimum of f along coordinate e starting from q[e]: downhill
/// bracketing from a small step, then Brent. Leaves the minimizer in q[e].
template <class F, std::size_t N>
double coordinate_min(F&& f, std::array<double, N>& q, std::size_t e, double lo, double hi) {
  auto at = [&](double x) {
    auto t = q;
    t[e] = x;
    const double v = f(t);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  double s = 1e-4 * (hi - lo);
  double x0 = q[e], f0 = at(x0);
  double xl = std::max(lo, x0 - s), xr = std::min(hi, x0 + s);
  double fl = at(xl), fr = at(xr);
  while (fl < f0 && xl > lo) {
    xr = x0;
    x0 = xl;
    f0 = fl;
    s *= 2.0;
    xl = std::max(lo, x0 - s);
    fl = at(xl);
  }
  while (fr < f0 && xr < hi) {
    xl = x0;
    x0 = xr;
    f0 = fr;
    s *= 2.0;
    xr = std::min(hi, x0 + s);
    fr = at(xr);
  }
  if (xr > xl) {
    std::uintmax_t iters = 80;
    const auto [xm, fm] = boost::math::tools::brent_find_minima(at, xl, xr, 40, iters);
    if (fm < f0) {
      x0 = xm;
      f0 = fm;
    }
  }
  q[e] = x0;
  return f0;
}

// ---------------------------------------------------------------------------
// Step family

using StepParams = std::array<double, 4>;  // x_V, C, x_w, w_low

StepProblem make_step(const SearchSpace& s, const StepParams& p, bool high_first) {
  StepProblem sp;
  sp.interval = s.interval;
  sp.x_minus = p[0];
  sp.v_max = p[1];
  sp.xhat_minus = p[2];
  sp.n_big = s.n_big;
  sp.w_low = p[3];
  sp.density_high_first = high_first;
  return sp;
}

double step_gap(const StepProblem& sp) {
  try {
    return eigenvalues_step(sp, 2).gap();
  } catch (const SolverError&) {
    return kInf;
  }
}

struct StartResult {
  StepParams p;
  bool high_first;
  double gamma;
  std::vector<TraceEntry> trace;
  std::size_t evaluations = 0;
  bool converged = false;
};

StartResult run_step_start(const SearchSpace& s, StepParams p, bool high_first, const OptimizerOptions& o) {
  const double a = s.interval.a(), b = s.interval.b();
  const std::array<double, 4> lo{a, 0.0, a, s.n_less}, hi{b, s.M, b, s.n_big};
  std::vector<std::size_t> active;
  if (s.M > 0.0) active.insert(active.end(), {0, 1});
  if (s.n_less < s.n_big) active.insert(active.end(), {2, 3});

  StartResult r{p, high_first, 0.0, {}, 0, false};
  auto eval = [&](const StepParams& q) {
    ++r.evaluations;
    return step_gap(make_step(s, q, high_first));
  };
  r.gamma = eval(p);
  r.trace.push_back({0, r.gamma});
  if (active.empty()) {
    r.converged = true;
    return r;
  }
  for (std::size_t sweep = 1; sweep <= o.max_sweeps; ++sweep) {
    const double before = r.gamma;
    const StepParams prev = r.p;
    for (std::size_t c : active) {
      auto along = [&](double x) {
        StepParams q = r.p;
        q[c] = x;
        return eval(q);
      };
      const Point best = line_min(along, lo[c], hi[c], r.p[c], r.gamma, o);
      r.p[c] = best.x;
      r.gamma = best.f;
    }
    // Barrier height at fixed well phase (x_V - a) sqrt(C); follows the
    // resonance valleys that the axis directions cross.
    if (s.M > 0.0 && r.p[1] > 0.0 && r.p[0] > a) {
      const double phase = (r.p[0] - a) * std::sqrt(r.p[1]);
      const double c_lo = std::max(std::pow(phase / (b - a), 2), 1e-300);
      auto along = [&](double C) {
        StepParams q = r.p;
        q[1] = C;
        q[0] = std::min(a + phase / std::sqrt(C), b);
        return eval(q);
      };
      if (c_lo < s.M) {
        const Point best = line_min(along, c_lo, s.M, r.p[1], r.gamma, o);
        if (best.x != r.p[1]) {
          r.p[0] = std::min(a + phase / std::sqrt(best.x), b);
          r.p[1] = best.x;
          r.gamma = best.f;
        }
      }
    }
    // Newton on log gamma: tunnelling gaps decay exponentially in the
    // parameters. The reduced passes minimize over one jump location inside
    // each evaluation, which pins the avoided crossings that make the valley
    // floor too narrow for a finite-difference stencil.
    auto log_gap = [&](const StepParams& q) { return std::log(eval(q)); };
    auto polish = [&](std::optional<std::size_t> e) {
      std::vector<std::size_t> outer;
      for (std::size_t c : active)
        if (c != e) outer.push_back(c);
      if (outer.empty()) return;
      StepParams q = r.p;
      double lg;
      if (e) {
        auto reduced = [&](StepParams& t) { return coordinate_min(log_gap, t, *e, lo[*e], hi[*e]); };
        lg = reduced(q);
        newton_polish(reduced, q, lg, lo, hi, outer, o.newton_steps, kLogGain);
      } else {
        lg = log_gap(q);
        newton_polish([&](StepParams& t) { return log_gap(t); }, q, lg, lo, hi, outer, o.newton_steps, kLogGain);
      }
      const double g = eval(q);
      if (g < r.gamma) {
        r.p = q;
        r.gamma = g;
      }
    };
    if (o.newton_steps > 0) {
      polish(std::nullopt);
      if (s.M > 0.0) polish(0);
      if (s.n_less < s.n_big) polish(2);
    }
    // Pattern move along the sweep displacement.
    StepParams q = r.p;
    for (std::size_t c : active) q[c] = std::clamp(2.0 * r.p[c] - prev[c], lo[c], hi[c]);
    if (q != r.p) {
      const double gq = eval(q);
      if (gq < r.gamma) {
        r.p = q;
        r.gamma = gq;
      }
    }
    r.trace.push_back({sweep, r.gamma});
    if (before - r.gamma < o.sweep_tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Monotone piecewise-constant family

struct PwcState {
  std::vector<double> vb, vl, wb, wl;  // interior breakpoints and levels
  std::size_t vt = 0, wt = 0;          // transition indices
};

double level_at(const std::vector<double>& bps, const std::vector<double>& levels, double x) {
  const auto it = std::upper_bound(bps.begin(), bps.end(), x);
  return levels[static_cast<std::size_t>(it - bps.begin())];
}

LayeredProblem pwc_layered(const SearchSpace& s, const PwcState& st) {
  const double a = s.interval.a(), b = s.interval.b();
  const double eps = 1e-14 * s.interval.length();
  std::vector<double> cuts{a};
  std::vector<double> inner = st.vb;
  inner.insert(inner.end(), st.wb.begin(), st.wb.end());
  std::sort(inner.begin(), inner.end());
  for (double x : inner)
    if (x > cuts.back() + eps && x < b - eps) cuts.push_back(x);
  cuts.push_back(b);
  std::vector<double> V, W;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    V.push_back(level_at(st.vb, st.vl, mid));
    W.push_back(level_at(st.wb, st.wl, mid));
  }
  return LayeredProblem(std::move(cuts), std::move(V), std::move(W));
}

double pwc_gap(const SearchSpace& s, const PwcState& st) {
  try {
    const LayeredProblem lp = pwc_layered(s, st);
    return lp.eigenvalue(2) - lp.eigenvalue(1);
  } catch (const SolverError&) {
    return kInf;
  }
}

/// Coordinate: 0 V breakpoint, 1 V level, 2 w breakpoint, 3 w level. Level
/// coordinates cover the block [index, last] of tied levels moved together.
struct Coord {
  int kind;
  std::size_t index;
  std::size_t last;
};

void set_coord(PwcState& st, Coord c, double x) {
  switch (c.kind) {
    case 0: st.vb[c.index] = x; return;
    case 2: st.wb[c.index] = x; return;
    default: {
      auto& l = c.kind == 1 ? st.vl : st.wl;
      for (std::size_t j = c.index; j <= c.last; ++j) l[j] = x;
    }
  }
}

double get_coord(const PwcState& st, Coord c) {
  switch (c.kind) {
    case 0: return st.vb[c.index];
    case 1: return st.vl[c.index];
    case 2: return st.wb[c.index];
    default: return st.wl[c.index];
  }
}

/// Feasible range of one coordinate with all others held.
std::pair<double, double> coord_range(const SearchSpace& s, const PwcState& st, Coord c) {
  const std::size_t p = c.index, q = c.last;
  if (c.kind == 0 || c.kind == 2) {
    const auto& bp = c.kind == 0 ? st.vb : st.wb;
    return {p == 0 ? s.interval.a() : bp[p - 1], p + 1 == bp.size() ? s.interval.b() : bp[p + 1]};
  }
  const auto& l = c.kind == 1 ? st.vl : st.wl;
  const double floor = c.kind == 1 ? 0.0 : s.n_less;
  const double cap = c.kind == 1 ? s.M : s.n_big;
  const bool has_prev = p > 0, has_next = q + 1 < l.size();
  const std::size_t t = c.kind == 1 ? st.vt : st.wt;
  double lo = floor, hi = cap;
  if (c.kind == 1) {
    // Non-increasing on [0, t], non-decreasing on [t, K-1].
    if (q < t) {
      if (has_prev) hi = std::min(hi, l[p - 1]);
      lo = std::max(lo, l[q + 1]);
    } else if (p <= t) {
      if (has_prev) hi = std::min(hi, l[p - 1]);
      if (has_next) hi = std::min(hi, l[q + 1]);
    } else {
      lo = std::max(lo, l[p - 1]);
      if (has_next) hi = std::min(hi, l[q + 1]);
    }
  } else {
    // Non-decreasing on [0, t], non-increasing on [t, K-1].
    if (q < t) {
      if (has_prev) lo = std::max(lo, l[p - 1]);
      hi = std::min(hi, l[q + 1]);
    } else if (p <= t) {
      if (has_prev) lo = std::max(lo, l[p - 1]);
      if (has_next) lo = std::max(lo, l[q + 1]);
    } else {
      hi = std::min(hi, l[p - 1]);
      if (has_next) lo = std::max(lo, l[q + 1]);
    }
  }
  return {lo, std::max(lo, hi)};
}

/// Maximal runs of equal adjacent levels longer than one.
std::vector<Coord> tied_blocks(const std::vector<double>& l, int kind) {
  std::vector<Coord> out;
  for (std::size_t p = 0; p < l.size();) {
    std::size_t q = p;
    while (q + 1 < l.size() && l[q + 1] == l[p]) ++q;
    if (q > p) out.push_back({kind, p, q});
    p = q + 1;
  }
  return out;
}

/// Monotone on [0, t] and on [t, K-1] in the directions of the class.
bool shape_with_transition(const std::vector<double>& l, std::size_t t, bool well) {
  for (std::size_t j = 0; j + 1 < l.size(); ++j) {
    const bool falling = l[j + 1] <= l[j], rising = l[j + 1] >= l[j];
    if (j < t && !(well ? falling : rising)) return false;
    if (j >= t && !(well ? rising : falling)) return false;
  }
  return true;
}

/// The effective structure of one coefficient: one variable per block of
/// tied levels and one per breakpoint between distinct blocks.
struct PwcLayout {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // [first, last] level indices
};

PwcLayout layout_of(const std::vector<double>& l) {
  PwcLayout out;
  for (std::size_t p = 0; p < l.size();) {
    std::size_t q = p;
    while (q + 1 < l.size() && l[q + 1] == l[p]) ++q;
    out.blocks.push_back({p, q});
    p = q + 1;
  }
  return out;
}

constexpr std::size_t kPwcVars = 32;
using PwcVec = std::array<double, kPwcVars>;

struct PwcRun {
  PwcState st;
  double gamma = kInf;
  std::vector<TraceEntry> trace;
  std::size_t sweeps = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Bounded Newton on log gamma over the effective structure of the current
/// state. Infeasible trial points score +inf.
void pwc_newton(const SearchSpace& s, PwcRun& r, std::size_t steps) {
  const double a = s.interval.a(), b = s.interval.b();
  const bool vary_v = s.M > 0.0, vary_w = s.n_less < s.n_big;
  const PwcLayout lv = layout_of(r.st.vl), lw = layout_of(r.st.wl);
  PwcVec x{}, lo{}, hi{};
  std::vector<std::size_t> active;
  std::size_t n = 0;
  // Slots: per coefficient, block values then boundary breakpoints.
  auto add = [&](double v, double l, double h) {
    x[n] = v;
    lo[n] = l;
    hi[n] = h;
    active.push_back(n);
    return n++;
  };
  struct Slots {
    std::vector<std::size_t> value, boundary;
  } sv, sw;
  if (vary_v) {
    for (const auto& [p, q] : lv.blocks) sv.value.push_back(add(r.st.vl[p], 0.0, s.M));
    for (std::size_t k = 0; k + 1 < lv.blocks.size(); ++k) sv.boundary.push_back(add(r.st.vb[lv.blocks[k].second], a, b));
  }
  if (vary_w) {
    for (const auto& [p, q] : lw.blocks) sw.value.push_back(add(r.st.wl[p], s.n_less, s.n_big));
    for (std::size_t k = 0; k + 1 < lw.blocks.size(); ++k) sw.boundary.push_back(add(r.st.wb[lw.blocks[k].second], a, b));
  }
  if (active.empty() || n > kPwcVars) return;

  // Writes one coefficient; interior breakpoints of a block collapse onto its
  // right boundary.
  auto write = [&](const PwcVec& v, const PwcLayout& lay, const Slots& sl, std::vector<double>& levels,
                   std::vector<double>& bps) {
    for (std::size_t k = 0; k < lay.blocks.size(); ++k) {
      const auto [p, q] = lay.blocks[k];
      for (std::size_t j = p; j <= q; ++j) levels[j] = v[sl.value[k]];
      const double right = k + 1 < lay.blocks.size() ? v[sl.boundary[k]] : b;
      for (std::size_t j = p; j < q && j < bps.size(); ++j) bps[j] = right;
      if (k + 1 < lay.blocks.size()) bps[q] = right;
    }
    return std::is_sorted(bps.begin(), bps.end());
  };
  auto build = [&](const PwcVec& v, PwcState& st) {
    st = r.st;
    if (vary_v && !write(v, lv, sv, st.vl, st.vb)) return false;
    if (vary_w && !write(v, lw, sw, st.wl, st.wb)) return false;
    return shape_with_transition(st.vl, st.vt, true) && shape_with_transition(st.wl, st.wt, false);
  };
  auto f = [&](PwcVec& v) {
    PwcState st;
    if (!build(v, st)) return kInf;
    ++r.evaluations;
    return std::log(pwc_gap(s, st));
  };
  double fx = f(x);
  if (!std::isfinite(fx)) return;
  newton_polish(f, x, fx, lo, hi, active, steps, kLogGain);
  PwcState st;
  if (!build(x, st)) return;
  const double g = pwc_gap(s, st);
  if (g < r.gamma) {
    r.st = st;
    r.gamma = g;
  }
}

void pwc_sweeps(const SearchSpace& s, PwcRun& r, std::size_t budget, const OptimizerOptions& o) {
  std::vector<Coord> coords;
  const std::size_t K = r.st.vl.size();
  const bool vary_v = s.M > 0.0, vary_w = s.n_less < s.n_big;
  if (vary_v) {
    for (std::size_t i = 0; i + 1 < K; ++i) coords.push_back({0, i, i});
    for (std::size_t i = 0; i < K; ++i) coords.push_back({1, i, i});
  }
  if (vary_w) {
    for (std::size_t i = 0; i + 1 < K; ++i) coords.push_back({2, i, i});
    for (std::size_t i = 0; i < K; ++i) coords.push_back({3, i, i});
  }
  if (coords.empty()) r.converged = true;
  auto search = [&](Coord c) {
    const auto [lo, hi] = coord_range(s, r.st, c);
    PwcState trial = r.st;
    auto along = [&](double x) {
      set_coord(trial, c, x);
      ++r.evaluations;
      return pwc_gap(s, trial);
    };
    const Point best = line_min(along, lo, hi, get_coord(r.st, c), r.gamma, o);
    set_coord(r.st, c, best.x);
    r.gamma = best.f;
  };
  while (!r.converged && r.sweeps < budget) {
    const double before = r.gamma;
    for (Coord c : coords) search(c);
    // Levels pinned against a neighbour can only move as a block.
    std::vector<Coord> blocks;
    if (vary_v) blocks = tied_blocks(r.st.vl, 1);
    if (vary_w) {
      const auto wb = tied_blocks(r.st.wl, 3);
      blocks.insert(blocks.end(), wb.begin(), wb.end());
    }
    for (Coord c : blocks) search(c);
    if (o.newton_steps > 0 && r.gamma > 0.0 && std::isfinite(r.gamma)) pwc_newton(s, r, o.newton_steps);
    ++r.sweeps;
    r.trace.push_back({r.sweeps, r.gamma});
    if (before - r.gamma < o.sweep_tol) r.converged = true;
  }
}

// ---------------------------------------------------------------------------
// Stationarity

std::vector<double> levels_of(const PiecewiseFn& f) {
  std::vector<double> out;
  for (std::size_t i = 0; i < f.piece_count(); ++i) out.push_back(f.local_coefficients(i)[0]);
  return out;
}

/// Levels are non-increasing then non-decreasing (well) or the reverse.
bool monotone_shape(const std::vector<double>& l, bool well, double tol) {
  std::size_t i = 0;
  auto down = [&](std::size_t j) { return well ? l[j + 1] <= l[j] + tol : l[j + 1] >= l[j] - tol; };
  auto up = [&](std::size_t j) { return well ? l[j + 1] >= l[j] - tol : l[j + 1] <= l[j] + tol; };
  while (i + 1 < l.size() && down(i)) ++i;
  while (i + 1 < l.size() && up(i)) ++i;
  return i + 1 >= l.size();
}

bool admissible(const PiecewiseFn& f, bool well, double lo, double hi) {
  const auto l = levels_of(f);
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  const double tol = 1e-12 * scale;
  for (double v : l)
    if (v < lo - tol || v > hi + tol) return false;
  return monotone_shape(l, well, tol);
}

bool admissible_general(const PiecewiseFn& f, bool well, double lo, double hi) {
  if (f.is_piecewise_constant()) return admissible(f, well, lo, hi);
  return well ? find_single_well(f, hi).ok() : find_single_barrier(f, lo, hi).ok();
}

void add_unique(std::vector<double>& v, double x, double tol) {
  for (double y : v)
    if (std::abs(y - x) <= tol) return;
  v.push_back(x);
}

/// Two-level comparison functions split at each point, plus constants.
std::vector<PiecewiseFn> comparison_functions(const Interval& iv, const std::vector<double>& splits,
                                              const std::vector<double>& levels) {
  std::vector<PiecewiseFn> out;
  for (double v : levels) out.push_back(PiecewiseFn::constant(iv, v));
  for (double s : splits)
    for (double p : levels)
      for (double q : levels)
        if (p != q) out.push_back(PiecewiseFn::step(iv, s, p, q));
  return out;
}

}  // namespace

void SearchSpace::validate() const {
  if (!(M >= 0.0) || !std::isfinite(M)) throw InputError("M must be finite and non-negative");
  if (!(n_less > 0.0) || !(n_less <= n_big) || !std::isfinite(n_big))
    throw InputError("density bounds must satisfy 0 < N_less <= N_big < inf");
  if (K < 1 || K > 8) throw InputError("piece count K must lie in [1, 8]");
}

Optimum minimize_step_family(const SearchSpace& space, const OptimizerOptions& opt) {
  space.validate();
  const double a = space.interval.a(), L = space.interval.length();
  const std::array<double, 3> grid{0.25, 0.5, 0.75};

  std::vector<std::pair<StepParams, bool>> starts;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> jitter(-0.125, 0.125);
  for (bool high_first : {true, false})
    for (double fv : grid)
      for (double fw : grid) {
        double jv = 0.0, jw = 0.0;
        if (opt.seed != 0) {
          jv = jitter(rng);
          jw = jitter(rng);
        }
        starts.push_back({{a + L * (fv + jv), 0.5 * space.M, a + L * (fw + jw), 0.5 * (space.n_less + space.n_big)},
                          high_first});
      }

  std::vector<StartResult> results(starts.size());
  parallel_for(starts.size(), worker_count(opt.threads), [&](std::size_t i) {
    results[i] = run_step_start(space, starts[i].first, starts[i].second, opt);
  });

  std::size_t evaluations = 0;
  for (const auto& r : results) evaluations += r.evaluations;
  const auto key = [](const StartResult& r) { return std::tuple(r.gamma, !r.high_first, r.p); };
  const StartResult& best =
      *std::min_element(results.begin(), results.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });

  StepProblem sp = make_step(space, best.p, best.high_first);
  if (sp.v_max == 0.0) sp.x_minus = a;
  const double mid = space.interval.midpoint();
  double primary = mid;
  if (sp.v_max > 0.0 && sp.x_minus > a && sp.x_minus < space.interval.b())
    primary = sp.x_minus;
  else if (sp.w_low < sp.n_big)
    primary = sp.xhat_minus;
  sp.reflected = primary > mid + 1e-12 * L;

  const auto ev = eigenvalues_step(sp, 2);
  Optimum out{space,
              sp.potential(),
              sp.density(),
              ev.gap(),
              ev.lambda[0],
              ev.lambda[1],
              best.trace,
              0.0,
              sp,
              evaluations,
              std::all_of(results.begin(), results.end(), [](const auto& r) { return r.converged; })};
  out.stationarity = verify_stationarity(out);
  return out;
}

Optimum corroborate_monotone_pwc(const SearchSpace& space_in, std::size_t K, const OptimizerOptions& opt) {
  SearchSpace space = space_in;
  space.K = K;
  space.family = Family::monotone_pwc;
  space.validate();
  const double a = space.interval.a(), L = space.interval.length();

  PwcState init;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  for (std::size_t i = 1; i < K; ++i) {
    const double f = (static_cast<double>(i) + (opt.seed != 0 ? jitter(rng) : 0.0)) / static_cast<double>(K);
    init.vb.push_back(a + L * f);
  }
  init.wb = init.vb;
  init.vl.assign(K, 0.5 * space.M);
  init.wl.assign(K, 0.5 * (space.n_less + space.n_big));

  std::vector<PwcRun> runs(K * K);
  const std::size_t workers = worker_count(opt.threads);
  parallel_for(runs.size(), workers, [&](std::size_t i) {
    PwcRun& r = runs[i];
    r.st = init;
    r.st.vt = i / K;
    r.st.wt = i % K;
    r.gamma = pwc_gap(space, r.st);
    ++r.evaluations;
    r.trace.push_back({0, r.gamma});
    pwc_sweeps(space, r, std::min(opt.screening_sweeps, opt.max_sweeps), opt);
  });

  std::vector<std::size_t> order(runs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return runs[x].gamma < runs[y].gamma; });
  const std::size_t finalists = std::min(std::max<std::size_t>(opt.finalists, 1), order.size());
  parallel_for(finalists, workers, [&](std::size_t j) { pwc_sweeps(space, runs[order[j]], opt.max_sweeps, opt); });

  std::size_t evaluations = 0;
  for (const auto& r : runs) evaluations += r.evaluations;
  std::size_t best = order[0];
  for (std::size_t j = 1; j < finalists; ++j)
    if (runs[order[j]].gamma < runs[best].gamma ||
        (runs[order[j]].gamma == runs[best].gamma && order[j] < best))
      best = order[j];
  const PwcRun& r = runs[best];

  std::vector<double> vb{a}, wb{a};
  vb.insert(vb.end(), r.st.vb.begin(), r.st.vb.end());
  wb.insert(wb.end(), r.st.wb.begin(), r.st.wb.end());
  vb.push_back(space.interval.b());
  wb.push_back(space.interval.b());
  const LayeredProblem lp = pwc_layered(space, r.st);
  const double l1 = lp.eigenvalue(1), l2 = lp.eigenvalue(2);
  Optimum out{space,
              PiecewiseFn::piecewise_constant(vb, r.st.vl),
              PiecewiseFn::piecewise_constant(wb, r.st.wl),
              l2 - l1,
              l1,
              l2,
              r.trace,
              0.0,
              std::nullopt,
              evaluations,
              r.converged};
  out.stationarity = verify_stationarity(out);
  return out;
}

double verify_stationarity(const Optimum& opt) {
  const SearchSpace& s = opt.space;
  const Interval iv = s.interval;
  const Problem p(opt.V_star, opt.w_star);
  const double tol = 1e-12 * iv.length();

  std::vector<double> v_split, w_split;
  std::optional<CrossingReport> cr;

  const auto lp = LayeredProblem::from_problem(p);
  std::optional<LayeredMode> m1, m2;
  std::optional<SpectralPair> pair;
  if (lp) {
    m1 = lp->mode(lp->eigenvalue(1));
    m2 = lp->mode(lp->eigenvalue(2));
    try {
      cr = find_crossings(*m1, *m2);
    } catch (const SolverError&) {
    }
  } else {
    pair = solve_pair(p, Mesh(iv, Mesh::kDefaultNodes));
    try {
      cr = find_crossings(*pair);
    } catch (const SolverError&) {
    }
  }
  auto gap_deriv = [&](const PerturbationDirection& d) {
    if (lp)
      return LayeredProblem::eigenvalue_derivative(*m2, d.dV, d.dw) -
             LayeredProblem::eigenvalue_derivative(*m1, d.dV, d.dw);
    return gap_derivative(*pair, d);
  };
  auto interior = [&](double x) { return x > iv.a() + tol && x < iv.b() - tol; };

  if (cr) {
    for (double x : {cr->x_minus, cr->x_plus})
      if (interior(x)) add_unique(v_split, x, tol);
    for (double x : {cr->xhat_minus, cr->xhat_plus})
      if (interior(x)) add_unique(w_split, x, tol);
  }
  for (double x : opt.V_star.jump_locations()) add_unique(v_split, x, tol);
  for (double x : opt.w_star.jump_locations()) add_unique(w_split, x, tol);

  std::vector<double> v_levels{0.0}, w_levels{s.n_less};
  add_unique(v_levels, s.M, 0.0);
  add_unique(w_levels, s.n_big, 0.0);
  if (opt.V_star.is_piecewise_constant())
    for (double v : levels_of(opt.V_star)) add_unique(v_levels, v, 0.0);
  if (opt.w_star.is_piecewise_constant())
    for (double v : levels_of(opt.w_star)) add_unique(w_levels, v, 0.0);

  constexpr double kappa = 1e-3;
  double worst = 0.0;
  const double v_scale = std::max(1.0, s.M), w_scale = std::max(1.0, s.n_big);
  for (const auto& V1 : comparison_functions(iv, v_split, v_levels)) {
    const PiecewiseFn dV = V1 - opt.V_star;
    if (dV.max_abs() <= 1e-14 * v_scale) continue;
    if (!admissible_general(opt.V_star + kappa * dV, true, 0.0, s.M)) continue;
    worst = std::min(worst, gap_deriv(PerturbationDirection::potential_only(dV)) / dV.max_abs());
  }
  for (const auto& w1 : comparison_functions(iv, w_split, w_levels)) {
    const PiecewiseFn dw = w1 - opt.w_star;
    if (dw.max_abs() <= 1e-14 * w_scale) continue;
    if (!admissible_general(opt.w_star + kappa * dw, false, s.n_less, s.n_big)) continue;
    worst = std::min(worst, gap_deriv(PerturbationDirection::density_only(dw)) / (opt.lambda2 * dw.max_abs()));
  }
  return worst;
}

JumpSummary count_jumps(const PiecewiseFn& fn, double merge_width, double rel_tol) {
  // Pieces narrower than merge_width are invisible; jumps are read between
  // consecutive visible pieces.
  struct Piece {
    double x0, x1, level;
  };
  const auto bps = fn.breakpoints();
  std::vector<Piece> kept;
  for (std::size_t i = 0; i < fn.piece_count(); ++i)
    if (bps[i + 1] - bps[i] >= merge_width) kept.push_back({bps[i], bps[i + 1], fn.eval_piece(i, bps[i])});
  JumpSummary out{0, {}};
  if (kept.size() < 2) return out;
  double lo = kInf, hi = -kInf;
  for (const auto& p : kept) {
    lo = std::min(lo, p.level);
    hi = std::max(hi, p.level);
  }
  const double range = hi - lo;
  for (std::size_t i = 1; i < kept.size(); ++i)
    if (std::abs(kept[i].level - kept[i - 1].level) > rel_tol * range) {
      ++out.count;
      out.locations.push_back(0.5 * (kept[i - 1].x1 + kept[i].x0));
    }
  return out;
}

}  // namespace slgap
