#include "slgap/perturbation.hpp"

#include <array>
#include <cmath>

#include "slgap/errors.hpp"

namespace slgap {

PerturbationDirection PerturbationDirection::potential_only(PiecewiseFn dV) {
  const Interval iv = dV.interval();
  return {std::move(dV), PiecewiseFn::constant(iv, 0.0)};
}

PerturbationDirection PerturbationDirection::density_only(PiecewiseFn dw) {
  const Interval iv = dw.interval();
  return {PiecewiseFn::constant(iv, 0.0), std::move(dw)};
}

namespace {

void check_index(int index) {
  if (index != 1 && index != 2) throw InputError("eigenvalue index must be 1 or 2");
}

double level_derivative(const DiscreteLevel& lvl, const PerturbationDirection& dir, int index) {
  const auto dv = hat_averages(dir.dV, lvl.mesh);
  const auto dw = hat_averages(dir.dw, lvl.mesh);
  const auto& u = lvl.u[static_cast<std::size_t>(index - 1)];
  const double lam = lvl.lambda[static_cast<std::size_t>(index - 1)];
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (dv[i] - lam * dw[i]) * u[i] * u[i];
  return s * lvl.mesh.h();
}

}  // namespace

double eigenvalue_derivative(const SpectralPair& pair, const PerturbationDirection& dir, int index) {
  check_index(index);
  const double norm = pair.weighted_inner(index, index);
  if (std::abs(norm - 1.0) > 1e-6) throw InputError("eigenfunction is not weighted-normalized");
  if (pair.levels.size() >= 2) {
    const double c = level_derivative(pair.levels[0], dir, index);
    const double f = level_derivative(pair.levels[1], dir, index);
    return (4.0 * f - c) / 3.0;
  }
  const auto dv = hat_averages(dir.dV, pair.mesh);
  const auto dw = hat_averages(dir.dw, pair.mesh);
  const auto& u = index == 1 ? pair.u1 : pair.u2;
  const double lam = index == 1 ? pair.lambda1 : pair.lambda2;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (dv[i] - lam * dw[i]) * u[i] * u[i];
  return s * pair.mesh.h();
}

double gap_derivative(const SpectralPair& pair, const PerturbationDirection& dir) {
  return eigenvalue_derivative(pair, dir, 2) - eigenvalue_derivative(pair, dir, 1);
}

double eigenvalue_derivative(const LayeredProblem& lp, const PerturbationDirection& dir, int index) {
  check_index(index);
  const auto mode = lp.mode(lp.eigenvalue(static_cast<std::size_t>(index)));
  return LayeredProblem::eigenvalue_derivative(mode, dir.dV, dir.dw);
}

double gap_derivative(const LayeredProblem& lp, const PerturbationDirection& dir) {
  return eigenvalue_derivative(lp, dir, 2) - eigenvalue_derivative(lp, dir, 1);
}

namespace {

std::array<double, 2> perturbed_pair(const Problem& p, const PerturbationDirection& dir, double kappa,
                                     const Mesh& mesh) {
  Problem q(p.V() + kappa * dir.dV, p.w() + kappa * dir.dw, p.V0());
  const auto s = solve(q, mesh, 2);
  return {s.lambda[0], s.lambda[1]};
}

std::array<double, 2> central(const Problem& p, const PerturbationDirection& dir, double eps, const Mesh& mesh) {
  const auto plus = perturbed_pair(p, dir, eps, mesh);
  const auto minus = perturbed_pair(p, dir, -eps, mesh);
  return {(plus[0] - minus[0]) / (2.0 * eps), (plus[1] - minus[1]) / (2.0 * eps)};
}

std::array<double, 2> fd_both(const Problem& p, const PerturbationDirection& dir, const Mesh& mesh,
                              FiniteDifferenceOptions opt) {
  if (!(opt.eps > 0.0)) throw InputError("finite-difference step must be positive");
  const auto d1 = central(p, dir, opt.eps, mesh);
  if (!opt.richardson) return d1;
  const auto d2 = central(p, dir, 0.5 * opt.eps, mesh);
  return {(4.0 * d2[0] - d1[0]) / 3.0, (4.0 * d2[1] - d1[1]) / 3.0};
}

}  // namespace

double finite_difference_derivative(const Problem& p, const PerturbationDirection& dir, int index, const Mesh& mesh,
                                    FiniteDifferenceOptions opt) {
  check_index(index);
  return fd_both(p, dir, mesh, opt)[static_cast<std::size_t>(index - 1)];
}

double finite_difference_gap_derivative(const Problem& p, const PerturbationDirection& dir, const Mesh& mesh,
                                        FiniteDifferenceOptions opt) {
  const auto d = fd_both(p, dir, mesh, opt);
  return d[1] - d[0];
}

}  // namespace slgap
