#include "slgap/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "slgap/errors.hpp"

namespace slgap {

std::size_t SymTridiagonal::count_below(double sigma) const {
  const std::size_t n = d.size();
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = d[0] - sigma;
  for (std::size_t i = 0;;) {
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
    if (++i == n) break;
    q = d[i] - sigma - e[i - 1] * e[i - 1] / q;
  }
  return count;
}

namespace {

// Gaussian elimination with partial pivoting for (T - sigma I); U keeps two
// superdiagonals.
class ShiftedLU {
 public:
  ShiftedLU(const SymTridiagonal& t, double sigma) {
    const std::size_t n = t.size();
    u0_.assign(n, 0.0);
    u1_.assign(n, 0.0);
    u2_.assign(n, 0.0);
    l_.assign(n, 0.0);
    swap_.assign(n, false);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(t.d[i] - sigma));
    for (double v : t.e) scale = std::max(scale, std::abs(v));
    const double floor = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();

    // Row i currently holds (a, b, c) in columns i, i+1, i+2.
    double a = t.d[0] - sigma;
    double b = n > 1 ? t.e[0] : 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double sub = t.e[i];
      double na = t.d[i + 1] - sigma;
      double nb = i + 2 < n ? t.e[i + 1] : 0.0;
      if (std::abs(sub) > std::abs(a)) {
        // Swap rows i and i+1.
        swap_[i] = true;
        const double m = a / sub;
        l_[i] = m;
        u0_[i] = sub;
        u1_[i] = na;
        u2_[i] = nb;
        const double ra = b - m * na;
        const double rb = c - m * nb;
        a = ra;
        b = rb;
        c = 0.0;
      } else {
        if (a == 0.0) a = floor;
        const double m = sub / a;
        l_[i] = m;
        u0_[i] = a;
        u1_[i] = b;
        u2_[i] = c;
        a = na - m * b;
        b = nb - m * c;
        c = 0.0;
      }
    }
    if (std::abs(a) < floor) a = floor;
    u0_[n - 1] = a;
  }

  void solve(std::vector<double>& x) const {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swap_[i]) std::swap(x[i], x[i + 1]);
      x[i + 1] -= l_[i] * x[i];
    }
    for (std::size_t i = n; i-- > 0;) {
      double r = x[i];
      if (i + 1 < n) r -= u1_[i] * x[i + 1];
      if (i + 2 < n) r -= u2_[i] * x[i + 2];
      x[i] = r / u0_[i];
    }
  }

 private:
  std::vector<double> u0_, u1_, u2_, l_;
  std::vector<bool> swap_;
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TridiagonalEigen smallest_eigenpairs(const SymTridiagonal& t, std::size_t k) {
  const std::size_t n = t.size();
  if (n == 0 || t.e.size() + 1 != n) throw InputError("malformed tridiagonal matrix");
  if (k == 0 || k > n) throw InputError("requested eigenpair count out of range");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.e[i - 1]);
    if (i + 1 < n) r += std::abs(t.e[i]);
    lo = std::min(lo, t.d[i] - r);
    hi = std::max(hi, t.d[i] + r);
  }
  const double span = std::max(hi - lo, std::abs(hi) + std::abs(lo));
  lo -= 1e-12 * span + std::numeric_limits<double>::min();
  hi += 1e-12 * span + std::numeric_limits<double>::min();

  TridiagonalEigen out;
  out.values.reserve(k);
  double left = lo;
  for (std::size_t j = 0; j < k; ++j) {
    // Invariant: count_below(a) <= j < count_below(b).
    double a = left, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (b - a <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)))
        break;
      if (t.count_below(mid) > j) b = mid;
      else a = mid;
    }
    out.values.push_back(0.5 * (a + b));
    left = a;
  }

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t j = 0; j < k; ++j) {
    ShiftedLU lu(t, out.values[j]);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    for (int it = 0; it < 4; ++it) {
      lu.solve(v);
      // Keep clusters orthogonal to earlier vectors.
      for (std::size_t p = 0; p < j; ++p) {
        if (std::abs(out.values[p] - out.values[j]) > 1e-8 * std::max(1.0, std::abs(out.values[j])))
          continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += v[i] * out.vectors[p][i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * out.vectors[p][i];
      }
      const double nv = norm2(v);
      if (!(nv > 0.0) || !std::isfinite(nv)) throw SolverError("inverse iteration broke down");
      for (auto& x : v) x /= nv;
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

}  // namespace slgap
