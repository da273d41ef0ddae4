#include "slgap/step_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slgap/errors.hpp"
#include "slgap/quadrature.hpp"

namespace slgap {

namespace {

using std::numbers::pi;

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// int_0^L sin^2(k s) ds without cancellation for small k L.
double sin2_integral(double k, double L) {
  if (k * L < 1.0) return gauss10([k](double s) { const double v = std::sin(k * s); return v * v; }, 0.0, L);
  return 0.5 * L - std::sin(2.0 * k * L) / (4.0 * k);
}

// int_0^L (b1 sin(k s) + b2 cos(k s))^2 ds.
double trig_integral(double b1, double b2, double k, double L) {
  if (k * L < 1.0)
    return gauss10([=](double s) { const double v = b1 * std::sin(k * s) + b2 * std::cos(k * s); return v * v; }, 0.0, L);
  return 0.5 * (b1 * b1 + b2 * b2) * L + (b2 * b2 - b1 * b1) * std::sin(2.0 * k * L) / (4.0 * k) +
         b1 * b2 * (1.0 - std::cos(2.0 * k * L)) / (2.0 * k);
}

void require_secular(const StepProblem& sp) {
  if (!sp.secular_layout())
    throw InputError("secular equation covers only x_minus <= xhat_minus with the high density on the left");
}

// Theta on the branch within pi/2 of t x.
double theta(const StepProblem& sp, const SecularParams& p) {
  const double x = sp.x_minus - sp.interval.a();
  const double tx = p.t * x;
  const double base = std::atan2(p.eta * std::sin(tx), p.t * std::cos(tx));
  const double theta0 = base + pi * std::round((tx - base) / pi);
  return p.eta * (sp.xhat_minus - sp.x_minus) + theta0;
}

}  // namespace

void StepProblem::validate() const {
  auto inside = [&](double x) { return std::isfinite(x) && x >= interval.a() && x <= interval.b(); };
  if (!inside(x_minus)) throw InputError("x_minus must lie in the interval");
  if (!inside(xhat_minus)) throw InputError("xhat_minus must lie in the interval");
  if (!(v_max >= 0.0) || !std::isfinite(v_max)) throw InputError("v_max must be finite and >= 0");
  if (!(w_low > 0.0) || !(w_low <= n_big) || !std::isfinite(n_big))
    throw InputError("densities require 0 < w_low <= n_big < inf");
}

namespace {
PiecewiseFn canonical_potential(const StepProblem& sp) {
  return PiecewiseFn::step(sp.interval, sp.x_minus, 0.0, sp.v_max);
}
PiecewiseFn canonical_density(const StepProblem& sp) {
  return sp.density_high_first ? PiecewiseFn::step(sp.interval, sp.xhat_minus, sp.n_big, sp.w_low)
                               : PiecewiseFn::step(sp.interval, sp.xhat_minus, sp.w_low, sp.n_big);
}
}  // namespace

PiecewiseFn StepProblem::potential() const {
  validate();
  auto f = canonical_potential(*this);
  return reflected ? f.reflected() : f;
}

PiecewiseFn StepProblem::density() const {
  validate();
  auto f = canonical_density(*this);
  return reflected ? f.reflected() : f;
}

Problem StepProblem::problem() const { return Problem(potential(), density()); }

LayeredProblem StepProblem::layered() const {
  validate();
  const auto V = canonical_potential(*this);
  const auto w = canonical_density(*this);
  const auto merged = V.refined(w.breakpoints());
  const auto bps = merged.breakpoints();
  std::vector<double> b(bps.begin(), bps.end()), lv, lw;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const double mid = 0.5 * (b[i] + b[i + 1]);
    lv.push_back(V(mid));
    lw.push_back(w(mid));
  }
  return LayeredProblem(std::move(b), std::move(lv), std::move(lw));
}

SecularParams secular_params(const StepProblem& sp, double lambda) {
  sp.validate();
  if (!(lambda > sp.threshold()))
    throw InputError("secular parameters need lambda > v_max / w_low = " + num(sp.threshold()));
  return {std::sqrt(lambda * sp.n_big - sp.v_max), std::sqrt(lambda * sp.w_low - sp.v_max),
          std::sqrt(lambda * sp.n_big)};
}

double secular_residual(const StepProblem& sp, double lambda) {
  require_secular(sp);
  const auto p = secular_params(sp, lambda);
  const double th = theta(sp, p);
  const double zl = p.z * (sp.interval.b() - sp.xhat_minus);
  return p.eta * std::sin(zl) * std::cos(th) + p.z * std::cos(zl) * std::sin(th);
}

double secular_residual_tangent(const StepProblem& sp, double lambda) {
  require_secular(sp);
  const auto p = secular_params(sp, lambda);
  const double th = theta(sp, p);
  const double zl = p.z * (sp.interval.b() - sp.xhat_minus);
  if (std::abs(std::cos(zl)) < 1e-9 || std::abs(std::cos(th)) < 1e-9)
    throw InputError("lambda = " + num(lambda) + " is within 1e-9 of a tangent pole");
  return p.eta * std::tan(zl) + p.z * std::tan(th);
}

StepEigenvalues eigenvalues_step(const StepProblem& sp, std::size_t k, StepSpectrumOptions opt) {
  sp.validate();
  if (k == 0) throw InputError("k must be positive");
  const LayeredProblem lp = sp.layered();
  const double thr = sp.threshold();
  StepEigenvalues out;
  if (!sp.secular_layout())
    out.warnings.push_back("layout outside the secular equation (x_minus > xhat_minus or low density first); roots from the layered engine");

  for (std::size_t j = 1; j <= k; ++j) {
    auto [lo, hi] = lp.bracket(j);
    if (lo > opt.lambda_max)
      throw SolverError("fewer than " + std::to_string(k) + " roots below lambda_max = " + num(opt.lambda_max));
    // Isolate: exactly j - 1 eigenvalues below lo and j below hi.
    for (int it = 0; it < 200; ++it) {
      const std::size_t clo = lp.count_below(lo), chi = lp.count_below(hi);
      if (clo == j - 1 && chi == j) break;
      const double mid = 0.5 * (lo + hi);
      if (lp.count_below(mid) >= j) hi = mid;
      else lo = mid;
    }
    bool done = false;
    if (sp.secular_layout() && hi > thr) {
      double a = std::max(lo, thr + 1e-12 * std::max(std::abs(thr), 1e-300));
      if (a < hi && lp.count_below(a) == j - 1) {
        double b = hi;
        double fa = secular_residual(sp, a), fb = secular_residual(sp, b);
        if (fa == 0.0) {
          b = a;
        } else if (fb == 0.0) {
          a = b;
        } else if ((fa < 0.0) != (fb < 0.0)) {
          for (int it = 0; it < 400 && b - a > opt.rel_tol * std::max(std::abs(a), std::abs(b)); ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            const double fm = secular_residual(sp, mid);
            if (fm == 0.0) {
              a = b = mid;
              break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
              a = mid;
              fa = fm;
            } else {
              b = mid;
            }
          }
        } else {
          a = std::numeric_limits<double>::quiet_NaN();
        }
        if (std::isfinite(a)) {
          const double root = 0.5 * (a + b);
          if (root > opt.lambda_max)
            throw SolverError("fewer than " + std::to_string(k) + " roots below lambda_max = " + num(opt.lambda_max));
          out.lambda.push_back(root);
          out.route.push_back(RootRoute::secular);
          out.residual.push_back(std::abs(secular_residual(sp, root)));
          done = true;
        } else {
          out.warnings.push_back("root " + std::to_string(j) + ": no sign change of the secular residual; layered engine used");
        }
      } else {
        out.warnings.push_back("root " + std::to_string(j) + " lies at or below the threshold v_max / w_low; layered engine used");
      }
    } else if (sp.secular_layout()) {
      out.warnings.push_back("root " + std::to_string(j) + " lies at or below the threshold v_max / w_low; layered engine used");
    }
    if (!done) {
      const double root = lp.eigenvalue(j);
      if (root > opt.lambda_max)
        throw SolverError("fewer than " + std::to_string(k) + " roots below lambda_max = " + num(opt.lambda_max));
      out.lambda.push_back(root);
      out.route.push_back(RootRoute::layered);
      out.residual.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

namespace {

using Kind = StepEigenfunction::Kind;

struct Piece {
  Kind kind;
  double rate;
};

Piece piece_for(double Q) {
  if (Q > 0.0) return {Kind::oscillatory, std::sqrt(Q)};
  if (Q < 0.0) return {Kind::evanescent, std::sqrt(-Q)};
  return {Kind::linear, 0.0};
}

// S, C and their derivatives in s.
double S(const Piece& p, double s) {
  switch (p.kind) {
    case Kind::oscillatory: return std::sin(p.rate * s);
    case Kind::evanescent: return std::sinh(p.rate * s);
    default: return s;
  }
}
double C(const Piece& p, double s) {
  switch (p.kind) {
    case Kind::oscillatory: return std::cos(p.rate * s);
    case Kind::evanescent: return std::cosh(p.rate * s);
    default: return 1.0;
  }
}
double dS(const Piece& p, double s) {
  switch (p.kind) {
    case Kind::oscillatory: return p.rate * std::cos(p.rate * s);
    case Kind::evanescent: return p.rate * std::cosh(p.rate * s);
    default: return 1.0;
  }
}
double dC(const Piece& p, double s) {
  switch (p.kind) {
    case Kind::oscillatory: return -p.rate * std::sin(p.rate * s);
    case Kind::evanescent: return p.rate * std::sinh(p.rate * s);
    default: return 0.0;
  }
}
// Derivative scale of S at 0 (1 for the linear basis).
double dS0(const Piece& p) { return p.kind == Kind::linear ? 1.0 : p.rate; }

// int_0^L (b1 S + b2 C)^2 ds.
double piece_integral(const Piece& p, double b1, double b2, double L) {
  if (p.kind == Kind::oscillatory && p.rate * L >= 1.0) return trig_integral(b1, b2, p.rate, L);
  if (p.kind == Kind::evanescent && p.rate * L >= 1.0) {
    const double k = p.rate;
    const double sh2 = std::sinh(2.0 * k * L) / (4.0 * k);
    return b1 * b1 * (sh2 - 0.5 * L) + b2 * b2 * (sh2 + 0.5 * L) + b1 * b2 * (std::cosh(2.0 * k * L) - 1.0) / (2.0 * k);
  }
  return gauss10([&](double s) { const double v = b1 * S(p, s) + b2 * C(p, s); return v * v; }, 0.0, L);
}

}  // namespace

StepEigenfunction step_eigenfunction(const StepProblem& sp, double lambda) {
  require_secular(sp);
  sp.validate();
  if (!(lambda > 0.0)) throw InputError("step eigenvalues are positive; got lambda = " + num(lambda));
  const double a = sp.interval.a(), b = sp.interval.b();
  const double x = sp.x_minus - a;
  const double D = sp.xhat_minus - sp.x_minus;
  const double Lr = b - sp.xhat_minus;
  const double t = std::sqrt(lambda * sp.n_big);
  const Piece mid = piece_for(lambda * sp.n_big - sp.v_max);
  const Piece right = piece_for(lambda * sp.w_low - sp.v_max);

  StepEigenfunction f{sp, lambda, t, mid.rate, right.rate, mid.kind, right.kind, 1.0, 0.0, 0.0, 0.0, 0.0};
  f.beta2 = f.alpha1 * std::sin(t * x);
  f.beta1 = t * f.alpha1 * std::cos(t * x) / dS0(mid);
  const double um = f.beta1 * S(mid, D) + f.beta2 * C(mid, D);
  const double dum = f.beta1 * dS(mid, D) + f.beta2 * dC(mid, D);
  const double sr = S(right, Lr), dr = -dS(right, Lr);
  if (!std::isfinite(um) || !std::isfinite(dum) || !std::isfinite(sr) || !std::isfinite(dr))
    throw SolverError("closed-form eigenfunction overflows; use the layered engine");
  f.matching_residual = std::abs(um * dr - dum * sr) / (std::hypot(um, dum) * std::hypot(sr, dr));
  if (!(f.matching_residual <= 1e-8))
    throw InputError("lambda = " + num(lambda) + " is not an eigenvalue (matching residual " + num(f.matching_residual) + ")");
  f.alpha2 = (um * sr + dum * dr) / (sr * sr + dr * dr);

  const double norm = sp.n_big * f.alpha1 * f.alpha1 * sin2_integral(t, x) +
                      sp.n_big * piece_integral(mid, f.beta1, f.beta2, D) +
                      sp.w_low * f.alpha2 * f.alpha2 * piece_integral(right, 1.0, 0.0, Lr);
  const double s = 1.0 / std::sqrt(norm);
  f.alpha1 *= s;
  f.beta1 *= s;
  f.beta2 *= s;
  f.alpha2 *= s;
  return f;
}

double StepEigenfunction::canonical(double x) const {
  const double a = problem.interval.a(), b = problem.interval.b();
  if (x <= problem.x_minus) return alpha1 * std::sin(t * (x - a));
  if (x <= problem.xhat_minus) {
    const Piece p{middle, eta};
    const double s = x - problem.x_minus;
    return beta1 * S(p, s) + beta2 * C(p, s);
  }
  return alpha2 * S(Piece{right, z}, b - x);
}

double StepEigenfunction::operator()(double x) const {
  const double a = problem.interval.a(), b = problem.interval.b();
  return problem.reflected ? canonical(a + b - x) : canonical(x);
}

}  // namespace slgap
