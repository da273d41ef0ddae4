#pragma once

#include <stdexcept>
#include <string>

namespace slgap {

/// Malformed or out-of-range input (coefficients, intervals, class bounds).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, missing roots, degenerate crossings.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slgap
