#pragma once

#include <array>
#include <cstddef>

#include "slgap/layered.hpp"
#include "slgap/sl_solver.hpp"

namespace slgap {

/// Where u1^2 - u2^2 and lambda1 u1^2 - lambda2 u2^2 change sign.
///
/// u1^2 > u2^2 exactly on (x_minus, x_plus) and lambda1 u1^2 > lambda2 u2^2 on
/// (xhat_minus, xhat_plus). A missing crossing is reported as the interval
/// endpoint on its side.
struct CrossingReport {
  double x_minus;
  double x_plus;
  double xhat_minus;
  double xhat_plus;
  /// Sign changes of the unweighted and weighted differences.
  std::array<std::size_t, 2> crossing_counts{};
  bool ratio_monotone = false;
  double ratio_max_violation = 0.0;
  /// The weighted difference does not change sign once or twice with the
  /// positive part in the middle (x_hat fields then hold the endpoints).
  bool weighted_anomaly = false;
};

struct RatioReport {
  bool monotone;
  /// max over checked neighbours of v_{i+1} - v_i; negative when monotone.
  double max_violation;
  std::size_t checked_nodes;
};

/// Crossings from nodal values refined on local cubic interpolants.
/// Throws SolverError when the unweighted count is not 1 or 2, or when a
/// sign change is degenerate (relative difference below 1e-12 over more
/// than two cells).
CrossingReport find_crossings(const SpectralPair& pair);

/// Crossings of two exact modes, scanned on `samples` points plus the layer
/// interfaces and refined by bisection on the closed forms.
CrossingReport find_crossings(const LayeredMode& m1, const LayeredMode& m2, std::size_t samples = 8192);

/// v = u2/u1 strictly decreasing over nodes with |u1| > 1e-10 max|u1|.
RatioReport ratio_monotonicity(const SpectralPair& pair);

}  // namespace slgap
