#pragma once

#include <cstddef>
#include <vector>

namespace slgap {

/// Real symmetric tridiagonal matrix: diagonal d (size n), off-diagonal e (size n-1).
struct SymTridiagonal {
  std::vector<double> d;
  std::vector<double> e;

  std::size_t size() const { return d.size(); }
  /// Number of eigenvalues strictly below sigma (Sturm sequence).
  std::size_t count_below(double sigma) const;
};

struct TridiagonalEigen {
  std::vector<double> values;              // ascending
  std::vector<std::vector<double>> vectors;  // unit 2-norm
};

/// The k smallest eigenpairs by Sturm bisection and inverse iteration.
TridiagonalEigen smallest_eigenpairs(const SymTridiagonal& t, std::size_t k);

}  // namespace slgap
