#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "slgap/coefficients.hpp"

namespace slgap {

/// Dirichlet problem -u'' + (V + V0) u = lambda w u on the common interval.
class Problem {
 public:
  Problem(PiecewiseFn V, PiecewiseFn w, std::optional<PiecewiseFn> V0 = std::nullopt);

  const Interval& interval() const { return interval_; }
  const PiecewiseFn& V() const { return V_; }
  const PiecewiseFn& w() const { return w_; }
  const PiecewiseFn& V0() const { return V0_; }
  /// V + V0.
  const PiecewiseFn& total_potential() const { return q_; }
  double w_min() const { return w_min_; }

 private:
  Interval interval_;
  PiecewiseFn V_, w_, V0_, q_;
  double w_min_;
};

/// Minimum of fn over its interval, from piece endpoints and critical points.
double exact_min(const PiecewiseFn& fn);
double exact_max(const PiecewiseFn& fn);

/// Uniform mesh with n interior nodes, h = (b - a)/(n + 1).
class Mesh {
 public:
  static constexpr std::size_t kMinNodes = 64;
  static constexpr std::size_t kDefaultNodes = 4096;

  Mesh(const Interval& iv, std::size_t n);

  const Interval& interval() const { return iv_; }
  std::size_t n() const { return n_; }
  double h() const { return h_; }
  /// Interior node i in [0, n).
  double node(std::size_t i) const { return iv_.a() + h_ * static_cast<double>(i + 1); }
  std::vector<double> nodes() const;
  /// The mesh with half the spacing (2n + 1 interior nodes).
  Mesh refined() const { return Mesh(iv_, 2 * n_ + 1); }

 private:
  Interval iv_;
  std::size_t n_;
  double h_;
};

/// (1/h) * integral of fn against the hat function of each interior node.
/// Exact for piecewise polynomials, whatever the breakpoint positions.
std::vector<double> hat_averages(const PiecewiseFn& fn, const Mesh& mesh);

/// Discrete eigenpairs on one mesh: eigenvalues of the matrix problem,
/// vectors normalized by sum h * w_avg * u^2 = 1.
struct DiscreteLevel {
  Mesh mesh;
  std::vector<double> lambda;
  std::vector<std::vector<double>> u;
  std::vector<double> w_avg;
};

struct Spectrum {
  /// Extrapolated eigenvalues when `levels` holds two meshes.
  std::vector<double> lambda;
  /// levels[0] is the requested mesh, levels[1] (if present) its refinement.
  std::vector<DiscreteLevel> levels;

  const Mesh& mesh() const { return levels.front().mesh; }
  const std::vector<double>& u(std::size_t i) const { return levels.front().u[i]; }
};

struct SolveOptions {
  bool extrapolate = true;
};

/// Smallest k (<= 10) eigenpairs. Eigenvalues are Richardson-extrapolated
/// from meshes n and 2n + 1; vectors live on the requested mesh. Sign: u_i
/// positive at the first node where |u_i| exceeds 1e-10 max|u_i|.
Spectrum solve(const Problem& p, const Mesh& mesh, std::size_t k, SolveOptions opt = {});

/// The first two eigenpairs with the data every diagnostic inspects.
struct SpectralPair {
  double lambda1;
  double lambda2;
  std::vector<double> u1;
  std::vector<double> u2;
  Mesh mesh;
  std::vector<double> w_avg;
  std::vector<DiscreteLevel> levels;

  double gap() const { return lambda2 - lambda1; }
  /// sum h w u_i u_j (composite trapezoid; boundary values vanish).
  double weighted_inner(int i, int j) const;
};

SpectralPair solve_pair(const Problem& p, const Mesh& mesh, SolveOptions opt = {});
double gap(const Problem& p, const Mesh& mesh);

struct WronskianOptions {
  /// Nodes within this many cells of a coefficient jump are skipped.
  std::size_t exclude_cells_near_jumps = 0;
};

/// max_i |W'(x_i) - (lambda1 - lambda2) w u1 u2| with W = u1 u2' - u2 u1'
/// formed from half-node difference quotients.
double wronskian_residual(const SpectralPair& pair, const Problem& p, WronskianOptions opt = {});

}  // namespace slgap
