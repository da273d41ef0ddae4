#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "slgap/coefficients.hpp"
#include "slgap/sl_solver.hpp"

namespace slgap {

/// One layer of a piecewise-constant problem: -u'' + V u = lambda w u on [x0, x1].
struct Layer {
  double x0;
  double x1;
  double V;
  double w;

  double length() const { return x1 - x0; }
  /// lambda w - V; positive where solutions oscillate.
  double Q(double lambda) const { return lambda * w - V; }
};

/// Eigenfunction of a layered problem, stored through its exact values and
/// slopes at the layer interfaces. Normalized to int w u^2 = 1 with
/// u'(a) > 0.
class LayeredMode {
 public:
  double lambda() const { return lambda_; }
  const std::vector<Layer>& layers() const { return layers_; }
  /// u and u' at interface j (j = 0 is the left endpoint).
  double u_at_interface(std::size_t j) const { return u_[j]; }
  double du_at_interface(std::size_t j) const { return du_[j]; }

  double operator()(double x) const { return value(x, 0); }
  double derivative(double x) const { return value(x, 1); }

  /// int_{x0}^{x1} u^2 dx.
  double integral_u2(double x0, double x1) const;
  /// int f u^2 dx over the whole interval.
  double weighted_integral(const PiecewiseFn& f) const;

 private:
  friend class LayeredProblem;
  double value(double x, int order) const;
  double layer_value(std::size_t j, double s, int order) const;
  double layer_integral(std::size_t j, double s0, double s1) const;
  std::size_t layer_index(double x) const;

  double lambda_ = 0.0;
  std::vector<Layer> layers_;
  std::vector<double> u_, du_;
};

/// Dirichlet problem with piecewise-constant V and w, solved exactly through
/// a Pruefer phase that is advanced in closed form layer by layer.
class LayeredProblem {
 public:
  /// Layers from breakpoints and per-layer levels; adjacent equal layers are kept.
  LayeredProblem(std::vector<double> breakpoints, std::vector<double> V, std::vector<double> w);

  /// Layered form of a problem whose V + V0 and w are piecewise constant.
  static std::optional<LayeredProblem> from_problem(const Problem& p);

  Interval interval() const { return Interval(layers_.front().x0, layers_.back().x1); }
  const std::vector<Layer>& layers() const { return layers_; }

  /// Pruefer angle at b for u(a) = 0, u'(a) = 1: continuous and increasing
  /// in lambda, equal to k pi exactly at the k-th eigenvalue.
  double phase(double lambda) const;
  /// Number of eigenvalues strictly below lambda.
  std::size_t count_below(double lambda) const;
  /// Interval guaranteed to contain the k-th eigenvalue (k >= 1).
  std::pair<double, double> bracket(std::size_t k) const;
  /// k-th eigenvalue (k >= 1), to near machine precision.
  double eigenvalue(std::size_t k) const;
  std::vector<double> eigenvalues(std::size_t count) const;

  /// Eigenfunction for an eigenvalue lambda (as returned by eigenvalue()).
  LayeredMode mode(double lambda) const;

  /// d lambda / d kappa for V + kappa dV, w + kappa dw (dV, dw on the same interval).
  static double eigenvalue_derivative(const LayeredMode& mode, const PiecewiseFn& dV, const PiecewiseFn& dw);

  PiecewiseFn potential() const;
  PiecewiseFn density() const;

 private:
  std::vector<Layer> layers_;
};

}  // namespace slgap
