#pragma once

#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "slgap/coefficients.hpp"
#include "slgap/layered.hpp"
#include "slgap/sl_solver.hpp"

namespace slgap {

/// Step coefficients with one jump each, written in canonical coordinates:
///   V = 0 on (a, x_minus), v_max on (x_minus, b);
///   w = n_big on (a, xhat_minus), w_low on (xhat_minus, b)   (density_high_first)
///   w = w_low on (a, xhat_minus), n_big on (xhat_minus, b)   (otherwise).
/// With `reflected` the physical problem is the image under x -> a + b - x.
struct StepProblem {
  Interval interval{0.0, std::numbers::pi};
  double x_minus = 1.0;
  double v_max = 0.0;
  double xhat_minus = 1.0;
  double n_big = 1.0;
  double w_low = 1.0;
  bool reflected = false;
  bool density_high_first = true;

  /// Throws InputError unless a <= x_minus, xhat_minus <= b, v_max >= 0 and
  /// 0 < w_low <= n_big.
  void validate() const;
  /// The three-piece layout covered by the secular equation:
  /// high density first and x_minus <= xhat_minus.
  bool secular_layout() const { return density_high_first && x_minus <= xhat_minus; }
  /// v_max / w_low: the secular equation needs lambda above this.
  double threshold() const { return v_max / w_low; }

  /// Physical coefficients (reflection applied).
  PiecewiseFn potential() const;
  PiecewiseFn density() const;
  Problem problem() const;
  /// Canonical (unreflected) layered form; eigenvalues are reflection invariant.
  LayeredProblem layered() const;
};

struct SecularParams {
  double eta;  // sqrt(lambda n_big - v_max)
  double z;    // sqrt(lambda w_low - v_max)
  double t;    // sqrt(lambda n_big)
};

/// Throws InputError unless lambda > threshold().
SecularParams secular_params(const StepProblem& sp, double lambda);

/// Continuous product form
///   F = eta sin(z L_r) cos(Theta) + z cos(z L_r) sin(Theta),
///   Theta = eta (xhat - x) + arctan((eta/t) tan(t x)) on the branch of t x,
/// with x, xhat measured from a and L_r = b - xhat. Its zeros above the
/// threshold are exactly the eigenvalues. Requires secular_layout().
double secular_residual(const StepProblem& sp, double lambda);

/// The tangent form eta tan(z L_r) + z tan(Theta); throws InputError within
/// 1e-9 of a pole of either tangent.
double secular_residual_tangent(const StepProblem& sp, double lambda);

enum class RootRoute { secular, layered };

struct StepEigenvalues {
  std::vector<double> lambda;
  std::vector<RootRoute> route;
  /// |F| at each secular root, NaN for layered roots.
  std::vector<double> residual;
  std::vector<std::string> warnings;

  double gap() const { return lambda.at(1) - lambda.at(0); }
};

struct StepSpectrumOptions {
  /// Roots beyond this bound are an error.
  double lambda_max = std::numeric_limits<double>::infinity();
  /// Bisection stops at this relative width.
  double rel_tol = 1e-14;
};

/// Smallest k eigenvalues. Each root is isolated by the Pruefer count of the
/// layered form, then bisected on the secular residual. Roots at or below the
/// threshold, and layouts outside secular_layout(), come from the layered
/// engine with a warning.
StepEigenvalues eigenvalues_step(const StepProblem& sp, std::size_t k, StepSpectrumOptions opt = {});

/// Closed-form eigenfunction for the secular layout:
///   alpha1 sin(t (x - a))                                 on (a, x_minus)
///   beta1 S(eta (x - x_minus)) + beta2 C(eta (...))       on (x_minus, xhat_minus)
///   alpha2 S(z (b - x))                                   on (xhat_minus, b)
/// in canonical coordinates, scaled to int w u^2 = 1 with alpha1 > 0.
/// (S, C) is (sin, cos) where the piece oscillates and (sinh, cosh) where
/// lambda w < v_max, in which case eta and z hold sqrt(v_max - lambda w).
struct StepEigenfunction {
  enum class Kind { oscillatory, evanescent, linear };

  StepProblem problem;
  double lambda;
  double t, eta, z;
  Kind middle, right;
  double alpha1, beta1, beta2, alpha2;
  /// Sine of the angle between the (u, u') vectors meeting at xhat_minus.
  double matching_residual;

  /// Physical coordinates (reflection applied).
  double operator()(double x) const;
  double canonical(double x) const;
};

/// Throws InputError if the layout is not secular_layout() or if the
/// matching residual exceeds 1e-8 (lambda is not an eigenvalue).
StepEigenfunction step_eigenfunction(const StepProblem& sp, double lambda);

}  // namespace slgap
