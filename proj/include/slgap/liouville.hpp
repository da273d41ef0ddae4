#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "slgap/coefficients.hpp"
#include "slgap/sl_solver.hpp"

namespace slgap {

/// Normal form -eta'' + psi eta = lambda eta on [0, L] of -u'' + V u = lambda w u,
/// with xi = int_a^x sqrt(w) and
///   psi = w''/(4 w^2) - 5 (w')^2/(16 w^3) + V/w.
/// Nodes are the uniform x-grid plus the breakpoints of V and w.
struct LiouvilleData {
  Interval interval;
  double L;
  std::vector<double> x;
  /// xi(x), strictly increasing from 0 to L.
  std::vector<double> xi;
  std::vector<double> psi;
  /// d psi / d xi and d^2 psi / d xi^2, using d xi / dx = sqrt(w).
  std::vector<double> dpsi;
  std::vector<double> d2psi;
  /// d psi / dx.
  std::vector<double> dpsi_dx;
  /// Cubic Hermite interpolant of psi in xi on [0, L].
  PiecewiseFn psi_of_xi;
};

/// Throws InputError when w is not C^2 across its breakpoints or not positive.
LiouvilleData liouville_potential(const Problem& p, std::size_t cells = 4096);

struct EquivalenceReport {
  std::array<double, 2> original;
  std::array<double, 2> transformed;
  /// max over n of |lambda_n - lambda_n[psi]| / |lambda_n|.
  double max_relative;
};

/// Solves both forms with the matrix solver on `mesh_n` nodes and compares
/// lambda_1 and lambda_2.
EquivalenceReport eigenvalue_equivalence_check(const Problem& p, std::size_t mesh_n = Mesh::kDefaultNodes);

struct ConvexityReport {
  bool convex;
  double min_d2psi;
  double x_at_min;
};

/// Convex iff d^2 psi / d xi^2 >= -1e-10 at every interior node.
ConvexityReport convexity_report(const LiouvilleData& data);

/// 3 pi^2 / L^2 with L = int sqrt(w). Defined for any positive w.
double lavine_bound(const Problem& p);

/// max |d psi / dx| over interior nodes; zero exactly when psi is constant.
double equality_condition_residual(const Problem& p, std::size_t cells = 4096);

/// V = c w - w''/(4 w) + 5 (w')^2/(16 w^2), for which psi = c. Each piece
/// of w is split into `splits` parts carrying degree-16 Taylor expansions.
PiecewiseFn constant_psi_potential(const PiecewiseFn& w, double c, std::size_t splits = 32);

}  // namespace slgap
