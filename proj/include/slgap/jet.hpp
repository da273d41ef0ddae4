#pragma once

#include <array>
#include <cstddef>

namespace slgap {

/// Truncated Taylor series c0 + c1 s + ... + c_{N-1} s^{N-1} about a point.
/// Arithmetic propagates exact derivatives, so rational expressions of
/// polynomial coefficients (the Liouville potential, for instance) are
/// differentiated without finite differences.
template <std::size_t N>
class Jet {
 public:
  constexpr Jet() = default;
  constexpr explicit Jet(double value) { c_[0] = value; }

  static constexpr Jet variable(double x) {
    Jet j(x);
    if constexpr (N > 1) j.c_[1] = 1.0;
    return j;
  }

  static constexpr Jet from_coefficients(const std::array<double, N>& c) {
    Jet j;
    j.c_ = c;
    return j;
  }

  constexpr double operator[](std::size_t i) const { return c_[i]; }
  constexpr double& operator[](std::size_t i) { return c_[i]; }
  constexpr double value() const { return c_[0]; }

  /// k-th derivative at the expansion point.
  constexpr double derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return c_[k] * f;
  }

  /// Series of the derivative; the top coefficient is lost.
  constexpr Jet differentiated() const {
    Jet d;
    for (std::size_t i = 0; i + 1 < N; ++i) d.c_[i] = static_cast<double>(i + 1) * c_[i + 1];
    return d;
  }

  constexpr Jet& operator+=(const Jet& o) {
    for (std::size_t i = 0; i < N; ++i) c_[i] += o.c_[i];
    return *this;
  }
  constexpr Jet& operator-=(const Jet& o) {
    for (std::size_t i = 0; i < N; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  constexpr Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend constexpr Jet operator-(Jet a) { return a *= -1.0; }
  friend constexpr Jet operator*(Jet a, double s) { return a *= s; }
  friend constexpr Jet operator*(double s, Jet a) { return a *= s; }
  friend constexpr Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend constexpr Jet operator+(double s, Jet a) { return a + s; }
  friend constexpr Jet operator-(Jet a, double s) { return a + (-s); }
  friend constexpr Jet operator-(double s, const Jet& a) { return -a + s; }

  friend constexpr Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; i + j < N; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    return r;
  }

  friend constexpr Jet operator/(const Jet& a, const Jet& b) {
    // r * b = a, solved term by term.
    Jet r;
    for (std::size_t k = 0; k < N; ++k) {
      double acc = a.c_[k];
      for (std::size_t j = 1; j <= k; ++j) acc -= b.c_[j] * r.c_[k - j];
      r.c_[k] = acc / b.c_[0];
    }
    return r;
  }
  friend constexpr Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
  friend constexpr Jet operator/(double s, const Jet& b) { return Jet(s) / b; }

 private:
  std::array<double, N> c_{};
};

}  // namespace slgap
