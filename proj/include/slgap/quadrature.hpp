#pragma once

#include <boost/math/quadrature/gauss.hpp>

namespace slgap {

/// 10-point Gauss-Legendre rule on [x0, x1]; exact for degree <= 19.
template <class F>
double gauss10(F&& f, double x0, double x1) {
  if (x1 <= x0) return 0.0;
  return boost::math::quadrature::gauss<double, 10>::integrate(f, x0, x1);
}

}  // namespace slgap
