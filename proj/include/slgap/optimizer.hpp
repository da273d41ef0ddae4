#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "slgap/coefficients.hpp"
#include "slgap/step_spectrum.hpp"

namespace slgap {

enum class Family { step_family, monotone_pwc };

/// Admissible classes: single-well V with 0 <= V <= M and single-barrier w
/// with n_less <= w <= n_big.
struct SearchSpace {
  Interval interval{0.0, std::numbers::pi};
  double M = 0.0;
  double n_less = 1.0;
  double n_big = 1.0;
  Family family = Family::step_family;
  /// Piece count for monotone_pwc.
  std::size_t K = 4;

  /// Throws InputError unless 0 <= M < inf, 0 < n_less <= n_big < inf, 1 <= K <= 8.
  void validate() const;
};

struct OptimizerOptions {
  /// Stop when a full sweep improves the gap by less than this.
  double sweep_tol = 1e-10;
  std::size_t max_sweeps = 200;
  /// 0 keeps the 3x3 start grid exact; other seeds jitter it.
  std::uint64_t seed = 0;
  /// 0: SLGAP_THREADS or hardware concurrency.
  std::size_t threads = 0;
  /// Line search: uniform samples plus geometric samples towards each end.
  std::size_t linear_samples = 32;
  std::size_t geometric_samples = 12;
  /// monotone_pwc: sweeps given to every transition-index pair before the
  /// best `finalists` pairs are run to convergence.
  std::size_t screening_sweeps = 8;
  std::size_t finalists = 3;
  /// Bounded Newton steps (finite-difference Hessian) after each step-family
  /// sweep; 0 disables the polish.
  std::size_t newton_steps = 12;
};

struct TraceEntry {
  std::size_t iteration;
  double gamma;
};

struct Optimum {
  SearchSpace space;
  PiecewiseFn V_star;
  PiecewiseFn w_star;
  double gamma;
  double lambda1;
  double lambda2;
  /// Best gap after each sweep of the winning start; non-increasing.
  std::vector<TraceEntry> trace;
  /// Most negative gap derivative over admissible comparison directions.
  double stationarity;
  /// Set for the step family (canonical orientation, jump in the left half).
  std::optional<StepProblem> step;
  std::size_t evaluations;
  bool converged;
};

/// Minimizes the gap over V = C chi (one jump), w = two levels (one jump),
/// C in [0, M], lower density level in [n_less, n_big], both density
/// orientations, from a 3x3 grid of jump locations.
Optimum minimize_step_family(const SearchSpace& space, const OptimizerOptions& opt = {});

/// Coordinate descent over K-piece monotone piecewise-constant V and w with
/// free breakpoints; every pair of transition indices is tried.
Optimum corroborate_monotone_pwc(const SearchSpace& space, std::size_t K, const OptimizerOptions& opt = {});

/// Minimum of the gap derivative along V1 - V_* and w1 - w_* over two-level
/// comparison functions V1, w1 split at the crossing points and the jumps of
/// the optimum, keeping directions whose small multiples stay admissible.
/// Each derivative is divided by |V1 - V_*|_inf, or by lambda2 |w1 - w_*|_inf
/// for density directions. Returns 0 when no direction lowers the gap.
double verify_stationarity(const Optimum& opt);

struct JumpSummary {
  std::size_t count;
  std::vector<double> locations;
};

/// Jumps of a piecewise-constant function after dropping pieces narrower
/// than merge_width. A jump counts when it exceeds rel_tol times the range of
/// the remaining levels; its location is the middle of the dropped gap.
JumpSummary count_jumps(const PiecewiseFn& fn, double merge_width, double rel_tol = 1e-3);

}  // namespace slgap
