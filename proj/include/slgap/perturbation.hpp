#pragma once

#include "slgap/coefficients.hpp"
#include "slgap/layered.hpp"
#include "slgap/sl_solver.hpp"

namespace slgap {

/// dV/dkappa and dw/dkappa at kappa = 0.
struct PerturbationDirection {
  PiecewiseFn dV;
  PiecewiseFn dw;

  static PerturbationDirection potential_only(PiecewiseFn dV);
  static PerturbationDirection density_only(PiecewiseFn dw);
};

/// d lambda_index / d kappa = int dV u^2 - lambda int dw u^2 (index 1 or 2),
/// evaluated with the discrete mass matrix on each mesh level of the pair and
/// extrapolated like the eigenvalues. Throws InputError when the stored
/// eigenfunction is not normalized to 1e-6.
double eigenvalue_derivative(const SpectralPair& pair, const PerturbationDirection& dir, int index);
/// Derivative of lambda2 - lambda1.
double gap_derivative(const SpectralPair& pair, const PerturbationDirection& dir);

/// Exact derivative for a piecewise-constant problem.
double eigenvalue_derivative(const LayeredProblem& lp, const PerturbationDirection& dir, int index);
double gap_derivative(const LayeredProblem& lp, const PerturbationDirection& dir);

struct FiniteDifferenceOptions {
  double eps = 1e-4;
  /// Combine steps eps and eps/2 as (4 D(eps/2) - D(eps)) / 3.
  bool richardson = true;
};

/// Central difference of the extrapolated solver eigenvalue along dir.
double finite_difference_derivative(const Problem& p, const PerturbationDirection& dir, int index,
                                    const Mesh& mesh, FiniteDifferenceOptions opt = {});
double finite_difference_gap_derivative(const Problem& p, const PerturbationDirection& dir, const Mesh& mesh,
                                        FiniteDifferenceOptions opt = {});

}  // namespace slgap
