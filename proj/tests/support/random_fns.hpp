#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "slgap/coefficients.hpp"

namespace slgap::testing {

/// Continuous piecewise-linear function through `knots` random values in
/// [lo, hi] at uniformly spaced abscissae.
inline PiecewiseFn random_piecewise_linear(std::mt19937_64& rng, const Interval& iv, int knots, double lo,
                                           double hi) {
  std::uniform_real_distribution<double> val(lo, hi);
  std::vector<double> bps, ys;
  for (int i = 0; i <= knots; ++i) {
    bps.push_back(iv.a() + iv.length() * i / knots);
    ys.push_back(val(rng));
  }
  bps.back() = iv.b();
  std::vector<std::vector<double>> pieces;
  for (int i = 0; i < knots; ++i) pieces.push_back({ys[i], (ys[i + 1] - ys[i]) / (bps[i + 1] - bps[i])});
  return PiecewiseFn::from_local(bps, pieces);
}

}  // namespace slgap::testing
