#include "slgap/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "slgap/errors.hpp"

namespace slgap {

namespace {

struct Samples {
  Interval iv;
  std::vector<double> x, u1, u2;
  double lambda1, lambda2;
  double cell;  // typical spacing, for the degeneracy width
  std::function<std::array<double, 2>(double)> eval;
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

struct SignChanges {
  std::vector<double> roots;
  int first_sign = 0;
  int last_sign = 0;
};

SignChanges scan(const Samples& s, double c1, double c2) {
  const double m1 = max_abs(s.u1), m2 = max_abs(s.u2);
  auto g = [&](double a, double b) { return c1 * a * a - c2 * b * b; };
  auto scale = [&](double a, double b) { return std::abs(c1) * a * a + std::abs(c2) * b * b; };

  // Significant samples: one of the modes is not negligible.
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.x.size(); ++i)
    if (std::abs(s.u1[i]) > 1e-10 * m1 || std::abs(s.u2[i]) > 1e-10 * m2) idx.push_back(i);

  SignChanges out;
  int prev_sign = 0;
  std::size_t prev = 0;
  bool tiny_run = false;
  for (std::size_t i : idx) {
    const double gv = g(s.u1[i], s.u2[i]);
    if (gv == 0.0 || std::abs(gv) <= 1e-12 * scale(s.u1[i], s.u2[i])) {
      tiny_run = true;
      continue;
    }
    const int sg = gv > 0.0 ? 1 : -1;
    if (prev_sign == 0) {
      out.first_sign = sg;
    } else if (sg != prev_sign) {
      // Degenerate when the near-zero run between the two signs is wide.
      if (tiny_run && s.x[i] - s.x[prev] > 2.0 * s.cell + 1e-12 * s.iv.length())
        throw SolverError("degenerate crossing near x = " + std::to_string(0.5 * (s.x[i] + s.x[prev])));
      double lo = s.x[prev], hi = s.x[i];
      for (int it = 0; it < 100 && hi - lo > 4e-16 * std::max(std::abs(lo), std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto u = s.eval(mid);
        const double gm = g(u[0], u[1]);
        if ((gm > 0.0 ? 1 : -1) == prev_sign) lo = mid;
        else hi = mid;
      }
      out.roots.push_back(0.5 * (lo + hi));
    }
    prev_sign = sg;
    prev = i;
    tiny_run = false;
  }
  out.last_sign = prev_sign;
  return out;
}

// Positions for the expected (-, +, -) pattern; false if the pattern differs.
bool place(const SignChanges& sc, const Interval& iv, double& lo, double& hi) {
  lo = iv.a();
  hi = iv.b();
  const auto n = sc.roots.size();
  if (n == 2 && sc.first_sign < 0) {
    lo = sc.roots[0];
    hi = sc.roots[1];
    return true;
  }
  if (n == 1) {
    if (sc.first_sign < 0) lo = sc.roots[0];
    else hi = sc.roots[0];
    return true;
  }
  return false;
}

CrossingReport report(const Samples& s) {
  CrossingReport r{};
  const auto plain = scan(s, 1.0, 1.0);
  r.crossing_counts[0] = plain.roots.size();
  if (plain.roots.empty() || plain.roots.size() > 2)
    throw SolverError("u1^2 = u2^2 has " + std::to_string(plain.roots.size()) + " interior crossings");
  if (!place(plain, s.iv, r.x_minus, r.x_plus))
    throw SolverError("u1^2 - u2^2 has the wrong sign pattern");

  const auto weighted = scan(s, s.lambda1, s.lambda2);
  r.crossing_counts[1] = weighted.roots.size();
  r.weighted_anomaly = !place(weighted, s.iv, r.xhat_minus, r.xhat_plus);
  return r;
}

// Cubic through the four nodes around x (boundary zeros included).
std::array<double, 2> interpolate(const SpectralPair& p, double x) {
  const double a = p.mesh.interval().a(), h = p.mesh.h();
  const auto n = static_cast<std::ptrdiff_t>(p.mesh.n());
  // Grid index g: x_g = a + g h, g = 0..n+1; node value u[g-1].
  auto val = [&](const std::vector<double>& u, std::ptrdiff_t g) {
    return (g <= 0 || g >= n + 1) ? 0.0 : u[static_cast<std::size_t>(g - 1)];
  };
  auto g0 = static_cast<std::ptrdiff_t>(std::floor((x - a) / h)) - 1;
  g0 = std::clamp<std::ptrdiff_t>(g0, 0, n - 2);
  const double t = (x - a) / h - static_cast<double>(g0);
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) {
    double l = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) l *= (t - j) / static_cast<double>(i - j);
    w[static_cast<std::size_t>(i)] = l;
  }
  std::array<double, 2> out{};
  for (int i = 0; i < 4; ++i) {
    out[0] += w[static_cast<std::size_t>(i)] * val(p.u1, g0 + i);
    out[1] += w[static_cast<std::size_t>(i)] * val(p.u2, g0 + i);
  }
  return out;
}

}  // namespace

RatioReport ratio_monotonicity(const SpectralPair& pair) {
  const double m = max_abs(pair.u1);
  RatioReport r{true, -std::numeric_limits<double>::infinity(), 0};
  bool have = false;
  double prev = 0.0;
  for (std::size_t i = 0; i < pair.u1.size(); ++i) {
    if (!(std::abs(pair.u1[i]) > 1e-10 * m)) continue;
    const double v = pair.u2[i] / pair.u1[i];
    ++r.checked_nodes;
    if (have) {
      r.max_violation = std::max(r.max_violation, v - prev);
      if (!(v < prev)) r.monotone = false;
    }
    prev = v;
    have = true;
  }
  return r;
}

CrossingReport find_crossings(const SpectralPair& pair) {
  Samples s{pair.mesh.interval(), pair.mesh.nodes(), pair.u1, pair.u2, pair.lambda1, pair.lambda2, pair.mesh.h(),
            [&pair](double x) { return interpolate(pair, x); }};
  CrossingReport r = report(s);
  const auto ratio = ratio_monotonicity(pair);
  r.ratio_monotone = ratio.monotone;
  r.ratio_max_violation = ratio.max_violation;
  return r;
}

CrossingReport find_crossings(const LayeredMode& m1, const LayeredMode& m2, std::size_t samples) {
  if (samples < 16) throw InputError("crossing scan needs at least 16 samples");
  const auto& layers = m1.layers();
  const Interval iv(layers.front().x0, layers.back().x1);
  std::vector<double> xs;
  for (std::size_t i = 1; i < samples; ++i) xs.push_back(iv.a() + iv.length() * static_cast<double>(i) / static_cast<double>(samples));
  for (const auto& l : layers)
    if (l.x0 > iv.a()) xs.push_back(l.x0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  Samples s{iv, xs, {}, {}, m1.lambda(), m2.lambda(), iv.length() / static_cast<double>(samples),
            [&](double x) { return std::array<double, 2>{m1(x), m2(x)}; }};
  for (double x : xs) {
    s.u1.push_back(m1(x));
    s.u2.push_back(m2(x));
  }
  CrossingReport r = report(s);
  // The ratio u2/u1 on the samples.
  double prev = 0.0, worst = -std::numeric_limits<double>::infinity();
  bool have = false, mono = true;
  const double mx = max_abs(s.u1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(std::abs(s.u1[i]) > 1e-10 * mx)) continue;
    const double v = s.u2[i] / s.u1[i];
    if (have) {
      worst = std::max(worst, v - prev);
      if (!(v < prev)) mono = false;
    }
    prev = v;
    have = true;
  }
  r.ratio_monotone = mono;
  r.ratio_max_violation = worst;
  return r;
}

}  // namespace slgap
