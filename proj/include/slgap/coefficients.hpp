#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slgap {

/// Closed interval [a, b] with finite a < b.
class Interval {
 public:
  Interval(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return b_ - a_; }
  double midpoint() const { return 0.5 * (a_ + b_); }
  bool contains(double x) const { return x >= a_ && x <= b_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double a_;
  double b_;
};

/// Piecewise-polynomial coefficient function.
///
/// Piece i lives on [x_i, x_{i+1}] and is stored in the local monomial basis
/// (x - x_i)^j. At interior breakpoints the function is left-continuous:
/// f(x_i) is the limit from piece i-1.
class PiecewiseFn {
 public:
  static constexpr std::size_t kMaxDegree = 16;

  /// Pieces given in powers of x (global basis).
  static PiecewiseFn from_global(std::vector<double> breakpoints,
                                 const std::vector<std::vector<double>>& pieces);
  /// Pieces given in powers of (x - left breakpoint).
  static PiecewiseFn from_local(std::vector<double> breakpoints,
                                std::vector<std::vector<double>> pieces);
  static PiecewiseFn constant(const Interval& iv, double value);
  /// `left` on [a, jump], `right` on (jump, b]. A jump at an endpoint
  /// degenerates to a constant.
  static PiecewiseFn step(const Interval& iv, double jump, double left, double right);
  /// levels[i] on (breakpoints[i], breakpoints[i+1]]. Zero-width pieces are dropped.
  static PiecewiseFn piecewise_constant(std::vector<double> breakpoints,
                                        const std::vector<double>& levels);

  Interval interval() const { return Interval(bps_.front(), bps_.back()); }
  std::span<const double> breakpoints() const { return bps_; }
  std::size_t piece_count() const { return coef_.size(); }
  std::span<const double> local_coefficients(std::size_t piece) const { return coef_[piece]; }
  std::size_t degree() const;

  /// Index of the piece governing x under the left-continuity convention.
  std::size_t piece_index(double x) const;

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  /// d^order f / dx^order at x, taken from the governing piece.
  double derivative(double x, int order = 1) const;
  /// Limit from the right (differs from eval only at jumps).
  double right_limit(double x) const;
  /// Evaluate piece `i` (or its derivative) at x, extrapolating if needed.
  double eval_piece(std::size_t i, double x, int order = 0) const;

  PiecewiseFn differentiated() const;
  double integral() const;
  double integral(double x0, double x1) const;

  /// Same function with additional breakpoints inserted.
  PiecewiseFn refined(std::span<const double> extra) const;
  /// x -> a + b - x.
  PiecewiseFn reflected() const;

  bool is_piecewise_constant(double tol = 0.0) const;
  /// Interior breakpoints where the value jumps by more than tol.
  std::vector<double> jump_locations(double tol = 1e-12) const;
  /// True when derivatives 0..order are continuous across every interior
  /// breakpoint (relative tolerance).
  bool is_smooth(int order, double tol = 1e-9) const;
  /// Critical points (interior roots of f') within piece i, ascending.
  std::vector<double> critical_points(std::size_t piece) const;

  double max_abs() const;

  PiecewiseFn operator+(const PiecewiseFn& o) const;
  PiecewiseFn operator-(const PiecewiseFn& o) const;
  PiecewiseFn operator*(double s) const;
  friend PiecewiseFn operator*(double s, const PiecewiseFn& f) { return f * s; }

 private:
  PiecewiseFn(std::vector<double> bps, std::vector<std::vector<double>> coef);
  void check() const;

  std::vector<double> bps_;
  std::vector<std::vector<double>> coef_;
};

/// A point where a class constraint fails.
struct Violation {
  double x;
  std::string what;
};

/// Either a validated spec or the list of failing points.
template <class Spec>
struct ClassCheck {
  std::optional<Spec> spec;
  std::vector<Violation> violations;
  bool ok() const { return spec.has_value(); }
};

/// Non-increasing on [a, transition], non-decreasing on [transition, b],
/// 0 <= fn <= upper_bound.
struct SingleWellSpec {
  PiecewiseFn fn;
  double transition;
  double upper_bound;
};

/// Non-decreasing on [a, transition], non-increasing on [transition, b],
/// lower_bound <= fn <= upper_bound.
struct SingleBarrierSpec {
  PiecewiseFn fn;
  double transition;
  double lower_bound;
  double upper_bound;
};

/// Points on the uniform validation grid (plus breakpoints and critical points).
inline constexpr std::size_t kValidationGrid = 4096;
inline constexpr double kValidationTol = 1e-12;

ClassCheck<SingleWellSpec> validate_single_well(const PiecewiseFn& fn, double transition, double M);
ClassCheck<SingleBarrierSpec> validate_single_barrier(const PiecewiseFn& fn, double transition,
                                                      double n_less, double n_big);

/// Single-well check with the transition point searched over the sample set.
ClassCheck<SingleWellSpec> find_single_well(const PiecewiseFn& fn, double M);
/// Single-barrier check with the transition point searched over the sample set.
ClassCheck<SingleBarrierSpec> find_single_barrier(const PiecewiseFn& fn, double n_less,
                                                  double n_big);

}  // namespace slgap
