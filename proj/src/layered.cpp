#include "slgap/layered.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "slgap/errors.hpp"
#include "slgap/quadrature.hpp"

namespace slgap {

namespace {

using std::numbers::pi;

// Pruefer state: (u, u') = exp(logmag) (-1)^Z (sin alpha, cos alpha) with
// alpha in [0, pi). Z counts zeros of u strictly inside the swept range.
struct State {
  long Z = 0;
  double alpha = 0.0;
  double logmag = 0.0;

  double sigma() const { return (Z % 2 == 0) ? 1.0 : -1.0; }
  double u() const { return sigma() * std::sin(alpha); }
  double du() const { return sigma() * std::cos(alpha); }
};

// Angle of the unit vector (u, du) given the expected zero count.
State from_vector(double u, double du, long Z, double logmag) {
  State s;
  s.logmag = logmag;
  const double sg = (Z % 2 == 0) ? 1.0 : -1.0;
  if (u == 0.0) {
    s.Z = (sg * du > 0.0) ? Z : Z + 1;
    s.alpha = 0.0;
    return s;
  }
  double a = std::atan2(sg * u, sg * du);
  if (a < 0.0) {
    // Rounding put the true angle just below Z pi.
    --Z;
    a += pi;
  }
  if (a >= pi) {
    ++Z;
    a -= pi;
  }
  s.Z = Z;
  s.alpha = a;
  return s;
}

State advance(const Layer& layer, double lambda, const State& s) {
  const double Q = layer.Q(lambda);
  const double len = layer.length();
  if (Q > 0.0) {
    const double k = std::sqrt(Q);
    const double sa = std::sin(s.alpha), ca = std::cos(s.alpha);
    const double beta0 = std::atan2(k * sa, ca);
    const double phi = beta0 + k * len;
    double m = std::floor(phi / pi);
    double beta1 = phi - m * pi;
    if (beta1 < 0.0) {
      beta1 += pi;
      m -= 1.0;
    } else if (beta1 >= pi) {
      beta1 -= pi;
      m += 1.0;
    }
    const double sb = std::sin(beta1), cb = std::cos(beta1);
    State r;
    r.Z = s.Z + static_cast<long>(m);
    r.alpha = std::atan2(sb, k * cb);
    if (r.alpha >= pi) {
      r.alpha = 0.0;
      ++r.Z;
    }
    const double amp = std::sqrt(sa * sa + ca * ca / Q);
    r.logmag = s.logmag + std::log(amp) + 0.5 * std::log(sb * sb + Q * cb * cb);
    return r;
  }
  const double u0 = s.u(), du0 = s.du();
  double u1, du1, addlog = 0.0;
  if (Q < 0.0) {
    const double kappa = std::sqrt(-Q);
    const double x = kappa * len;
    if (x <= 20.0) {
      const double ch = std::cosh(x), sh = std::sinh(x);
      u1 = u0 * ch + du0 * sh / kappa;
      du1 = u0 * kappa * sh + du0 * ch;
    } else {
      const double p = u0 + du0 / kappa, m = u0 - du0 / kappa, e = std::exp(-2.0 * x);
      u1 = p + m * e;
      du1 = kappa * (p - m * e);
      addlog = x - std::numbers::ln2;
    }
  } else {
    u1 = u0 + du0 * len;
    du1 = du0;
  }
  const bool crossed = u0 != 0.0 && (u1 == 0.0 || std::signbit(u1) != std::signbit(u0));
  const double nrm = std::hypot(u1, du1);
  return from_vector(u1 / nrm, du1 / nrm, s.Z + (crossed ? 1 : 0), s.logmag + addlog + std::log(nrm));
}

std::vector<State> sweep(const std::vector<Layer>& layers, double lambda) {
  std::vector<State> out;
  out.reserve(layers.size() + 1);
  out.emplace_back();
  for (const auto& l : layers) out.push_back(advance(l, lambda, out.back()));
  return out;
}

std::vector<Layer> reversed(const std::vector<Layer>& layers) {
  const double a = layers.front().x0, b = layers.back().x1;
  std::vector<Layer> r;
  r.reserve(layers.size());
  for (auto it = layers.rbegin(); it != layers.rend(); ++it)
    r.push_back({a + b - it->x1, a + b - it->x0, it->V, it->w});
  return r;
}

double phase_of(const State& s) { return static_cast<double>(s.Z) * pi + s.alpha; }

}  // namespace

LayeredProblem::LayeredProblem(std::vector<double> bps, std::vector<double> V, std::vector<double> w) {
  if (bps.size() < 2 || V.size() + 1 != bps.size() || w.size() + 1 != bps.size())
    throw InputError("layer count must equal breakpoint count minus one");
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    if (!(bps[i] < bps[i + 1])) throw InputError("layer breakpoints must be strictly ascending");
    if (!std::isfinite(V[i]) || !std::isfinite(w[i])) throw InputError("layer levels must be finite");
    if (!(w[i] > 0.0)) throw InputError("layer density must be positive");
    layers_.push_back({bps[i], bps[i + 1], V[i], w[i]});
  }
}

std::optional<LayeredProblem> LayeredProblem::from_problem(const Problem& p) {
  const PiecewiseFn& q = p.total_potential();
  const PiecewiseFn& w = p.w();
  if (!q.is_piecewise_constant() || !w.is_piecewise_constant()) return std::nullopt;
  const PiecewiseFn merged = q.refined(w.breakpoints());
  const auto bps = merged.breakpoints();
  std::vector<double> vb(bps.begin(), bps.end()), V, W;
  for (std::size_t i = 0; i + 1 < vb.size(); ++i) {
    const double mid = 0.5 * (vb[i] + vb[i + 1]);
    V.push_back(q(mid));
    W.push_back(w(mid));
  }
  return LayeredProblem(std::move(vb), std::move(V), std::move(W));
}

double LayeredProblem::phase(double lambda) const {
  State s;
  for (const auto& l : layers_) s = advance(l, lambda, s);
  return phase_of(s);
}

std::size_t LayeredProblem::count_below(double lambda) const {
  const double th = phase(lambda);
  const double c = std::ceil(th / pi) - 1.0;
  return c <= 0.0 ? 0 : static_cast<std::size_t>(c);
}

std::pair<double, double> LayeredProblem::bracket(std::size_t k) const {
  if (k == 0) throw InputError("eigenvalue index starts at 1");
  double vmin = layers_.front().V, vmax = vmin, wmin = layers_.front().w, wmax = wmin;
  for (const auto& l : layers_) {
    vmin = std::min(vmin, l.V);
    vmax = std::max(vmax, l.V);
    wmin = std::min(wmin, l.w);
    wmax = std::max(wmax, l.w);
  }
  const double L = interval().length();
  const double c = static_cast<double>(k * k) * pi * pi / (L * L);
  const double lo_num = c + vmin, hi_num = c + vmax;
  double lo = lo_num >= 0.0 ? lo_num / wmax : lo_num / wmin;
  double hi = hi_num >= 0.0 ? hi_num / wmin : hi_num / wmax;
  const double pad = 1e-9 * std::max({std::abs(lo), std::abs(hi), c / wmax});
  return {lo - pad, hi + pad};
}

double LayeredProblem::eigenvalue(std::size_t k) const {
  auto [lo, hi] = bracket(k);
  const double target = static_cast<double>(k) * pi;
  auto f = [&](double lam) { return phase(lam) - target; };
  double flo = f(lo), fhi = f(hi);
  for (int grow = 0; flo >= 0.0 && grow < 60; ++grow) {
    lo -= (hi - lo);
    flo = f(lo);
  }
  for (int grow = 0; fhi <= 0.0 && grow < 60; ++grow) {
    hi += (hi - lo);
    fhi = f(hi);
  }
  if (!(flo < 0.0 && fhi > 0.0)) throw SolverError("could not bracket layered eigenvalue");
  const double floor = 1e-15 * (hi - lo);
  auto tol = [floor](double a, double b) {
    return std::abs(b - a) <= std::max(4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)), floor);
  };
  std::uintmax_t iters = 300;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

std::vector<double> LayeredProblem::eigenvalues(std::size_t count) const {
  std::vector<double> out;
  for (std::size_t k = 1; k <= count; ++k) out.push_back(eigenvalue(k));
  return out;
}

LayeredMode LayeredProblem::mode(double lambda) const {
  // Split every layer so that every layer interior offers a match point.
  std::vector<Layer> fine;
  for (const auto& l : layers_) {
    const double mid = 0.5 * (l.x0 + l.x1);
    fine.push_back({l.x0, mid, l.V, l.w});
    fine.push_back({mid, l.x1, l.V, l.w});
  }
  const std::size_t m = fine.size();
  const auto left = sweep(fine, lambda);
  const auto right_rev = sweep(reversed(fine), lambda);
  auto right = [&](std::size_t j) -> const State& { return right_rev[m - j]; };

  // Both sweeps are accurate where the mode is large, so match where the
  // product of their amplitudes peaks.
  std::size_t js = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < m; ++j) {
    const double score = left[j].logmag + right(j).logmag;
    if (score > best) {
      best = score;
      js = j;
    }
  }
  const double dot = left[js].u() * right(js).u() - left[js].du() * right(js).du();
  const double sgn = dot >= 0.0 ? 1.0 : -1.0;

  std::vector<double> G(m + 1), U(m + 1), DU(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    if (j <= js) {
      G[j] = left[j].logmag;
      U[j] = left[j].u();
      DU[j] = left[j].du();
    } else {
      G[j] = left[js].logmag - right(js).logmag + right(j).logmag;
      U[j] = sgn * right(j).u();
      DU[j] = -sgn * right(j).du();
    }
  }
  const double gmax = *std::max_element(G.begin(), G.end());
  LayeredMode md;
  md.lambda_ = lambda;
  md.layers_ = fine;
  md.u_.resize(m + 1);
  md.du_.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const double s = std::exp(G[j] - gmax);
    md.u_[j] = s * U[j];
    md.du_[j] = s * DU[j];
  }
  double norm = 0.0;
  for (std::size_t j = 0; j < m; ++j) norm += fine[j].w * md.layer_integral(j, 0.0, fine[j].length());
  if (!(norm > 0.0) || !std::isfinite(norm)) throw SolverError("layered mode normalization failed");
  double scale = 1.0 / std::sqrt(norm);
  double lead = md.du_[0];
  for (std::size_t j = 1; lead == 0.0 && j <= m; ++j) lead = md.u_[j];
  if (lead < 0.0) scale = -scale;
  for (std::size_t j = 0; j <= m; ++j) {
    md.u_[j] *= scale;
    md.du_[j] *= scale;
  }
  return md;
}

double LayeredProblem::eigenvalue_derivative(const LayeredMode& mode, const PiecewiseFn& dV, const PiecewiseFn& dw) {
  return mode.weighted_integral(dV) - mode.lambda() * mode.weighted_integral(dw);
}

PiecewiseFn LayeredProblem::potential() const {
  std::vector<double> bps{layers_.front().x0}, lv;
  for (const auto& l : layers_) {
    bps.push_back(l.x1);
    lv.push_back(l.V);
  }
  return PiecewiseFn::piecewise_constant(std::move(bps), lv);
}

PiecewiseFn LayeredProblem::density() const {
  std::vector<double> bps{layers_.front().x0}, lv;
  for (const auto& l : layers_) {
    bps.push_back(l.x1);
    lv.push_back(l.w);
  }
  return PiecewiseFn::piecewise_constant(std::move(bps), lv);
}

// ---------------------------------------------------------------------------

std::size_t LayeredMode::layer_index(double x) const {
  auto it = std::upper_bound(layers_.begin(), layers_.end(), x, [](double v, const Layer& l) { return v < l.x1; });
  if (it == layers_.end()) return layers_.size() - 1;
  return static_cast<std::size_t>(it - layers_.begin());
}

double LayeredMode::layer_value(std::size_t j, double s, int order) const {
  const Layer& l = layers_[j];
  const double Q = l.Q(lambda_);
  const double u0 = u_[j], du0 = du_[j];
  if (Q > 0.0) {
    const double k = std::sqrt(Q);
    const double c = std::cos(k * s), sn = std::sin(k * s);
    return order == 0 ? u0 * c + du0 * sn / k : -u0 * k * sn + du0 * c;
  }
  if (Q < 0.0) {
    const double kappa = std::sqrt(-Q);
    const double L = l.length();
    if (kappa * L < 1.0) {
      const double ch = std::cosh(kappa * s), sh = std::sinh(kappa * s);
      return order == 0 ? u0 * ch + du0 * sh / kappa : u0 * kappa * sh + du0 * ch;
    }
    const double A = 0.5 * (u_[j + 1] + du_[j + 1] / kappa);
    const double B = 0.5 * (u0 - du0 / kappa);
    const double ea = std::exp(-kappa * (L - s)), eb = std::exp(-kappa * s);
    return order == 0 ? A * ea + B * eb : kappa * (A * ea - B * eb);
  }
  return order == 0 ? u0 + du0 * s : du0;
}

double LayeredMode::value(double x, int order) const {
  const std::size_t j = layer_index(x);
  const Layer& l = layers_[j];
  return layer_value(j, std::clamp(x, l.x0, l.x1) - l.x0, order);
}

double LayeredMode::layer_integral(std::size_t j, double s0, double s1) const {
  if (s1 <= s0) return 0.0;
  const Layer& l = layers_[j];
  const double Q = l.Q(lambda_);
  const double rate = std::sqrt(std::abs(Q));
  auto sq = [&](double s) {
    const double v = layer_value(j, s, 0);
    return v * v;
  };
  if (rate * (s1 - s0) < 1.0) return gauss10(sq, s0, s1);
  if (Q > 0.0) {
    const double k = rate;
    const double R = u_[j], P = du_[j] / k;
    return 0.5 * (R * R + P * P) * (s1 - s0) +
           (R * R - P * P) / (4.0 * k) * (std::sin(2.0 * k * s1) - std::sin(2.0 * k * s0)) -
           R * P / (2.0 * k) * (std::cos(2.0 * k * s1) - std::cos(2.0 * k * s0));
  }
  const double kappa = rate;
  const double L = l.length();
  const double A = 0.5 * (u_[j + 1] + du_[j + 1] / kappa);
  const double B = 0.5 * (u_[j] - du_[j] / kappa);
  return A * A / (2.0 * kappa) * (std::exp(-2.0 * kappa * (L - s1)) - std::exp(-2.0 * kappa * (L - s0))) +
         B * B / (2.0 * kappa) * (std::exp(-2.0 * kappa * s0) - std::exp(-2.0 * kappa * s1)) +
         2.0 * A * B * std::exp(-kappa * L) * (s1 - s0);
}

double LayeredMode::integral_u2(double x0, double x1) const {
  double total = 0.0;
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    const double lo = std::max(x0, layers_[j].x0), hi = std::min(x1, layers_[j].x1);
    if (hi > lo) total += layer_integral(j, lo - layers_[j].x0, hi - layers_[j].x0);
  }
  return total;
}

double LayeredMode::weighted_integral(const PiecewiseFn& f) const {
  const auto bps = f.breakpoints();
  double total = 0.0;
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    const auto coef = f.local_coefficients(i);
    for (std::size_t j = 0; j < layers_.size(); ++j) {
      const Layer& l = layers_[j];
      const double lo = std::max(bps[i], l.x0), hi = std::min(bps[i + 1], l.x1);
      if (!(hi > lo)) continue;
      if (coef.size() == 1) {
        total += coef[0] * layer_integral(j, lo - l.x0, hi - l.x0);
        continue;
      }
      const double rate = std::sqrt(std::abs(l.Q(lambda_)));
      const auto parts = static_cast<std::size_t>(std::clamp(std::ceil(rate * (hi - lo)), 1.0, 1e5));
      const double d = (hi - lo) / static_cast<double>(parts);
      for (std::size_t p = 0; p < parts; ++p) {
        const double a = lo + d * static_cast<double>(p);
        const double b = p + 1 == parts ? hi : a + d;
        total += gauss10(
            [&](double x) {
              const double v = layer_value(j, x - l.x0, 0);
              return f.eval_piece(i, x) * v * v;
            },
            a, b);
      }
    }
  }
  return total;
}

}  // namespace slgap
