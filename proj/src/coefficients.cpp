#include "slgap/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "slgap/errors.hpp"

namespace slgap {

namespace {

// Horner evaluation of the order-th derivative of sum c_j s^j.
double poly_eval(std::span<const double> c, double s, int order) {
  const int deg = static_cast<int>(c.size()) - 1;
  if (order > deg) return 0.0;
  double acc = 0.0;
  for (int j = deg; j >= order; --j) {
    double f = 1.0;
    for (int m = 0; m < order; ++m) f *= static_cast<double>(j - m);
    acc = acc * s + c[static_cast<std::size_t>(j)] * f;
  }
  return acc;
}

// Coefficients of p(s + shift) in powers of s.
std::vector<double> taylor_shift(std::span<const double> c, double shift) {
  const std::size_t n = c.size();
  std::vector<double> out(c.begin(), c.end());
  // Repeated synthetic division.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = n - 1; j > k; --j) out[j - 1] += shift * out[j];
  return out;
}

std::vector<double> trimmed(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.empty()) c.push_back(0.0);
  return c;
}

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

Interval::Interval(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw InputError("interval endpoints must be finite");
  if (!(a < b)) throw InputError("interval requires a < b, got [" + fmt_num(a) + ", " + fmt_num(b) + "]");
}

PiecewiseFn::PiecewiseFn(std::vector<double> bps, std::vector<std::vector<double>> coef)
    : bps_(std::move(bps)), coef_(std::move(coef)) {
  for (auto& c : coef_) c = trimmed(std::move(c));
  check();
}

void PiecewiseFn::check() const {
  if (bps_.size() < 2) throw InputError("piecewise function needs at least two breakpoints");
  if (coef_.size() + 1 != bps_.size())
    throw InputError("piece count must equal breakpoint count minus one");
  for (double x : bps_)
    if (!std::isfinite(x)) throw InputError("breakpoints must be finite");
  for (std::size_t i = 0; i + 1 < bps_.size(); ++i)
    if (!(bps_[i] < bps_[i + 1])) throw InputError("breakpoints must be strictly ascending");
  for (const auto& c : coef_) {
    if (c.size() > kMaxDegree + 1) throw InputError("piece degree exceeds " + std::to_string(kMaxDegree));
    for (double v : c)
      if (!std::isfinite(v)) throw InputError("piece coefficients must be finite");
  }
}

PiecewiseFn PiecewiseFn::from_global(std::vector<double> breakpoints,
                                     const std::vector<std::vector<double>>& pieces) {
  if (breakpoints.size() < 2 || pieces.size() + 1 != breakpoints.size())
    throw InputError("piece count must equal breakpoint count minus one");
  std::vector<std::vector<double>> local;
  local.reserve(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].empty()) throw InputError("empty piece coefficient list");
    local.push_back(taylor_shift(pieces[i], breakpoints[i]));
  }
  return PiecewiseFn(std::move(breakpoints), std::move(local));
}

PiecewiseFn PiecewiseFn::from_local(std::vector<double> breakpoints,
                                    std::vector<std::vector<double>> pieces) {
  for (const auto& p : pieces)
    if (p.empty()) throw InputError("empty piece coefficient list");
  return PiecewiseFn(std::move(breakpoints), std::move(pieces));
}

PiecewiseFn PiecewiseFn::constant(const Interval& iv, double value) {
  return PiecewiseFn({iv.a(), iv.b()}, {{value}});
}

PiecewiseFn PiecewiseFn::step(const Interval& iv, double jump, double left, double right) {
  if (!(jump >= iv.a() && jump <= iv.b())) throw InputError("step location outside interval");
  if (jump <= iv.a()) return constant(iv, right);
  if (jump >= iv.b()) return constant(iv, left);
  return PiecewiseFn({iv.a(), jump, iv.b()}, {{left}, {right}});
}

PiecewiseFn PiecewiseFn::piecewise_constant(std::vector<double> breakpoints,
                                            const std::vector<double>& levels) {
  if (breakpoints.size() != levels.size() + 1)
    throw InputError("level count must equal breakpoint count minus one");
  std::vector<double> bps{breakpoints.front()};
  std::vector<std::vector<double>> coef;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (breakpoints[i + 1] < breakpoints[i]) throw InputError("breakpoints must be ascending");
    if (breakpoints[i + 1] == bps.back()) continue;
    bps.push_back(breakpoints[i + 1]);
    coef.push_back({levels[i]});
  }
  if (coef.empty()) throw InputError("piecewise constant function has zero width");
  return PiecewiseFn(std::move(bps), std::move(coef));
}

std::size_t PiecewiseFn::degree() const {
  std::size_t d = 0;
  for (const auto& c : coef_) d = std::max(d, c.size() - 1);
  return d;
}

std::size_t PiecewiseFn::piece_index(double x) const {
  auto it = std::lower_bound(bps_.begin(), bps_.end(), x);
  std::ptrdiff_t idx = (it - bps_.begin()) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(coef_.size()) - 1);
  return static_cast<std::size_t>(idx);
}

namespace {
double clamp_to(const std::vector<double>& bps, double x) {
  const double a = bps.front(), b = bps.back();
  const double slack = 1e-12 * (b - a);
  if (x < a - slack || x > b + slack || std::isnan(x))
    throw InputError("evaluation point " + fmt_num(x) + " outside [" + fmt_num(a) + ", " + fmt_num(b) + "]");
  return std::clamp(x, a, b);
}
}  // namespace

double PiecewiseFn::eval_piece(std::size_t i, double x, int order) const {
  return poly_eval(coef_[i], x - bps_[i], order);
}

double PiecewiseFn::eval(double x) const {
  x = clamp_to(bps_, x);
  return eval_piece(piece_index(x), x);
}

double PiecewiseFn::derivative(double x, int order) const {
  x = clamp_to(bps_, x);
  return eval_piece(piece_index(x), x, order);
}

double PiecewiseFn::right_limit(double x) const {
  x = clamp_to(bps_, x);
  auto it = std::upper_bound(bps_.begin(), bps_.end(), x);
  std::ptrdiff_t idx = (it - bps_.begin()) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(coef_.size()) - 1);
  return eval_piece(static_cast<std::size_t>(idx), x);
}

PiecewiseFn PiecewiseFn::differentiated() const {
  std::vector<std::vector<double>> d;
  d.reserve(coef_.size());
  for (const auto& c : coef_) {
    std::vector<double> p;
    for (std::size_t j = 1; j < c.size(); ++j) p.push_back(static_cast<double>(j) * c[j]);
    if (p.empty()) p.push_back(0.0);
    d.push_back(std::move(p));
  }
  return PiecewiseFn(bps_, std::move(d));
}

double PiecewiseFn::integral() const { return integral(bps_.front(), bps_.back()); }

double PiecewiseFn::integral(double x0, double x1) const {
  double sign = 1.0;
  if (x1 < x0) {
    std::swap(x0, x1);
    sign = -1.0;
  }
  x0 = clamp_to(bps_, x0);
  x1 = clamp_to(bps_, x1);
  double total = 0.0;
  for (std::size_t i = 0; i < coef_.size(); ++i) {
    const double lo = std::max(x0, bps_[i]);
    const double hi = std::min(x1, bps_[i + 1]);
    if (hi <= lo) continue;
    const auto& c = coef_[i];
    auto antider = [&](double s) {
      double acc = 0.0;
      for (std::size_t j = c.size(); j-- > 0;) acc = acc * s + c[j] / static_cast<double>(j + 1);
      return acc * s;
    };
    total += antider(hi - bps_[i]) - antider(lo - bps_[i]);
  }
  return sign * total;
}

PiecewiseFn PiecewiseFn::refined(std::span<const double> extra) const {
  std::vector<double> bps = bps_;
  for (double x : extra)
    if (x > bps_.front() && x < bps_.back()) bps.push_back(x);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<std::vector<double>> coef;
  coef.reserve(bps.size() - 1);
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const double mid = 0.5 * (bps[k] + bps[k + 1]);
    const std::size_t i = piece_index(mid);
    coef.push_back(taylor_shift(coef_[i], bps[k] - bps_[i]));
  }
  return PiecewiseFn(std::move(bps), std::move(coef));
}

PiecewiseFn PiecewiseFn::reflected() const {
  const double a = bps_.front(), b = bps_.back();
  std::vector<double> bps;
  std::vector<std::vector<double>> coef;
  for (std::size_t k = bps_.size(); k-- > 0;) bps.push_back(a + b - bps_[k]);
  bps.front() = a;
  bps.back() = b;
  for (std::size_t i = coef_.size(); i-- > 0;) {
    // New local variable s' maps to old local sigma = L - s'.
    const double L = bps_[i + 1] - bps_[i];
    std::vector<double> shifted = taylor_shift(coef_[i], L);  // p(L + t)
    for (std::size_t j = 1; j < shifted.size(); j += 2) shifted[j] = -shifted[j];  // t = -s'
    coef.push_back(std::move(shifted));
  }
  return PiecewiseFn(std::move(bps), std::move(coef));
}

bool PiecewiseFn::is_piecewise_constant(double tol) const {
  for (const auto& c : coef_)
    for (std::size_t j = 1; j < c.size(); ++j)
      if (std::abs(c[j]) > tol) return false;
  return true;
}

std::vector<double> PiecewiseFn::jump_locations(double tol) const {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < bps_.size(); ++i) {
    const double left = eval_piece(i - 1, bps_[i]);
    const double right = eval_piece(i, bps_[i]);
    if (std::abs(left - right) > tol * std::max(1.0, std::max(std::abs(left), std::abs(right))))
      out.push_back(bps_[i]);
  }
  return out;
}

bool PiecewiseFn::is_smooth(int order, double tol) const {
  for (std::size_t i = 1; i + 1 < bps_.size(); ++i) {
    for (int k = 0; k <= order; ++k) {
      const double left = eval_piece(i - 1, bps_[i], k);
      const double right = eval_piece(i, bps_[i], k);
      if (std::abs(left - right) > tol * std::max(1.0, std::max(std::abs(left), std::abs(right))))
        return false;
    }
  }
  return true;
}

std::vector<double> PiecewiseFn::critical_points(std::size_t piece) const {
  const auto& c = coef_[piece];
  const double L = bps_[piece + 1] - bps_[piece];
  std::vector<double> roots;  // local coordinates
  if (c.size() <= 2) return {};
  if (c.size() == 3) {
    // c1 + 2 c2 s = 0
    roots.push_back(-c[1] / (2.0 * c[2]));
  } else if (c.size() == 4) {
    // c1 + 2 c2 s + 3 c3 s^2 = 0
    const double A = 3.0 * c[3], B = 2.0 * c[2], C = c[1];
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      if (q != 0.0) {
        roots.push_back(q / A);
        roots.push_back(C / q);
      } else {
        roots.push_back(0.0);
      }
    }
  } else {
    // Sign changes of f' on a fine sub-grid, refined by bisection.
    constexpr int kSub = 64;
    auto fp = [&](double s) { return poly_eval(c, s, 1); };
    double s0 = 0.0, f0 = fp(0.0);
    for (int k = 1; k <= kSub; ++k) {
      const double s1 = L * k / kSub;
      const double f1 = fp(s1);
      if ((f0 < 0.0) != (f1 < 0.0)) {
        double lo = s0, hi = s1, flo = f0;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = fp(mid);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
      s0 = s1;
      f0 = f1;
    }
  }
  std::vector<double> out;
  for (double s : roots)
    if (std::isfinite(s) && s > 0.0 && s < L) out.push_back(bps_[piece] + s);
  std::sort(out.begin(), out.end());
  return out;
}

double PiecewiseFn::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < coef_.size(); ++i) {
    m = std::max({m, std::abs(eval_piece(i, bps_[i])), std::abs(eval_piece(i, bps_[i + 1]))});
    for (double x : critical_points(i)) m = std::max(m, std::abs(eval_piece(i, x)));
  }
  return m;
}

PiecewiseFn PiecewiseFn::operator+(const PiecewiseFn& o) const {
  if (!(interval() == o.interval())) throw InputError("cannot add functions on different intervals");
  PiecewiseFn lhs = refined(o.bps_);
  PiecewiseFn rhs = o.refined(bps_);
  for (std::size_t i = 0; i < lhs.coef_.size(); ++i) {
    auto& c = lhs.coef_[i];
    const auto& d = rhs.coef_[i];
    if (c.size() < d.size()) c.resize(d.size(), 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) c[j] += d[j];
    c = trimmed(std::move(c));
  }
  return lhs;
}

PiecewiseFn PiecewiseFn::operator-(const PiecewiseFn& o) const { return *this + o * -1.0; }

PiecewiseFn PiecewiseFn::operator*(double s) const {
  auto coef = coef_;
  for (auto& c : coef)
    for (auto& v : c) v *= s;
  return PiecewiseFn(bps_, std::move(coef));
}

// ---------------------------------------------------------------------------
// Class validation

namespace {

struct Sample {
  double x;
  double value;
  // At a breakpoint the left limit closes the left section and the right
  // limit opens the right one; elsewhere a sample belongs to whichever side
  // of the transition it lies on (both, at the transition itself).
  bool left_limit;
  bool right_limit;
};

std::vector<Sample> collect_samples(const PiecewiseFn& fn, double transition) {
  const Interval iv = fn.interval();
  const auto bps = fn.breakpoints();
  std::vector<Sample> out;
  out.reserve(kValidationGrid + 8 * fn.piece_count());
  std::size_t g = 0;
  const double h = iv.length() / static_cast<double>(kValidationGrid);
  for (std::size_t i = 0; i < fn.piece_count(); ++i) {
    const double x0 = bps[i], x1 = bps[i + 1];
    std::vector<double> xs;
    while (g <= kValidationGrid) {
      const double x = (g == kValidationGrid) ? iv.b() : iv.a() + h * static_cast<double>(g);
      if (x >= x1) break;
      if (x > x0) xs.push_back(x);
      ++g;
    }
    for (double c : fn.critical_points(i)) xs.push_back(c);
    if (transition > x0 && transition < x1) xs.push_back(transition);
    std::sort(xs.begin(), xs.end());
    out.push_back({x0, fn.eval_piece(i, x0), false, true});
    for (double x : xs) out.push_back({x, fn.eval_piece(i, x), false, false});
    out.push_back({x1, fn.eval_piece(i, x1), true, false});
  }
  return out;
}

// Splits samples about the transition. The a.e. convention lets a jump that
// sits exactly on the transition belong to neither monotone section.
void split(const std::vector<Sample>& s, double t, std::vector<const Sample*>& left,
           std::vector<const Sample*>& right) {
  for (const auto& p : s) {
    const bool in_left = p.x < t || (p.x == t && !p.right_limit);
    const bool in_right = p.x > t || (p.x == t && !p.left_limit);
    if (in_left) left.push_back(&p);
    if (in_right) right.push_back(&p);
  }
}

void check_monotone(const std::vector<const Sample*>& seq, bool increasing, double tol,
                    const char* label, std::vector<Violation>& out) {
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const double d = seq[i]->value - seq[i - 1]->value;
    const bool bad = increasing ? (d < -tol) : (d > tol);
    if (bad && out.size() < 64) out.push_back({seq[i]->x, label});
  }
}

void check_bounds(const std::vector<Sample>& s, double lo, double hi, double tol,
                  std::vector<Violation>& out) {
  for (const auto& p : s) {
    if (out.size() >= 64) return;
    if (p.value < lo - tol) out.push_back({p.x, "below lower bound " + fmt_num(lo)});
    else if (p.value > hi + tol) out.push_back({p.x, "above upper bound " + fmt_num(hi)});
  }
}

double tolerance_for(const PiecewiseFn& fn, double bound) {
  return kValidationTol * std::max({1.0, std::abs(bound), fn.max_abs()});
}

}  // namespace

ClassCheck<SingleWellSpec> validate_single_well(const PiecewiseFn& fn, double transition, double M) {
  const Interval iv = fn.interval();
  if (!iv.contains(transition)) throw InputError("transition point outside interval");
  if (!(M >= 0.0) || !std::isfinite(M)) throw InputError("single-well bound M must be finite and >= 0");
  const auto samples = collect_samples(fn, transition);
  const double tol = tolerance_for(fn, M);
  std::vector<const Sample*> left, right;
  split(samples, transition, left, right);
  ClassCheck<SingleWellSpec> r;
  check_monotone(left, false, tol, "increasing before transition", r.violations);
  check_monotone(right, true, tol, "decreasing after transition", r.violations);
  check_bounds(samples, 0.0, M, tol, r.violations);
  if (r.violations.empty()) r.spec = SingleWellSpec{fn, transition, M};
  return r;
}

ClassCheck<SingleBarrierSpec> validate_single_barrier(const PiecewiseFn& fn, double transition,
                                                      double n_less, double n_big) {
  const Interval iv = fn.interval();
  if (!iv.contains(transition)) throw InputError("transition point outside interval");
  if (!(n_less > 0.0) || !(n_less <= n_big) || !std::isfinite(n_big))
    throw InputError("single-barrier bounds require 0 < N_less <= N_big < inf");
  const auto samples = collect_samples(fn, transition);
  const double tol = tolerance_for(fn, n_big);
  std::vector<const Sample*> left, right;
  split(samples, transition, left, right);
  ClassCheck<SingleBarrierSpec> r;
  check_monotone(left, true, tol, "decreasing before transition", r.violations);
  check_monotone(right, false, tol, "increasing after transition", r.violations);
  check_bounds(samples, n_less, n_big, tol, r.violations);
  if (r.violations.empty()) r.spec = SingleBarrierSpec{fn, transition, n_less, n_big};
  return r;
}

namespace {
// Location of the extreme sample; a single-well (barrier) function is
// monotone about any point where it attains its minimum (maximum).
double extreme_location(const PiecewiseFn& fn, bool minimum) {
  const auto samples = collect_samples(fn, fn.interval().a());
  const Sample* best = &samples.front();
  for (const auto& s : samples)
    if (minimum ? s.value < best->value : s.value > best->value) best = &s;
  return best->x;
}
}  // namespace

ClassCheck<SingleWellSpec> find_single_well(const PiecewiseFn& fn, double M) {
  return validate_single_well(fn, extreme_location(fn, true), M);
}

ClassCheck<SingleBarrierSpec> find_single_barrier(const PiecewiseFn& fn, double n_less, double n_big) {
  return validate_single_barrier(fn, extreme_location(fn, false), n_less, n_big);
}

}  // namespace slgap
