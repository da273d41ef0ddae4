#include "slgap/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "slgap/crossing.hpp"
#include "slgap/errors.hpp"
#include "slgap/io.hpp"
#include "slgap/liouville.hpp"
#include "slgap/optimizer.hpp"
#include "slgap/sl_solver.hpp"
#include "slgap/step_spectrum.hpp"

namespace slgap::cli {

namespace {

using io::Json;
namespace fs = std::filesystem;

constexpr std::array<std::pair<std::string_view, Command>, 7> kCommands{{
    {"solve", Command::solve},
    {"analyze", Command::analyze},
    {"secular", Command::secular},
    {"optimize", Command::optimize},
    {"liouville", Command::liouville},
    {"bounds", Command::bounds},
    {"validate", Command::validate},
}};

/// Validation failure with a report already written.
struct ClassViolation : InputError {
  using InputError::InputError;
};

/// Resolved settings: flag, then input "options", then default.
struct Settings {
  std::size_t mesh_n;
  std::size_t k;
  std::uint64_t seed;
  double rel_tol;
  double sweep_tol;
  std::size_t max_sweeps;
  std::size_t curve_points;
};

std::size_t count_option(const Json& opts, const char* key, std::size_t fallback) {
  if (!opts.contains(key)) return fallback;
  if (!opts[key].is_number_unsigned()) throw InputError(std::string("options.") + key + ": expected a non-negative integer");
  return opts[key].get<std::size_t>();
}

Settings resolve(const RunConfig& cfg, const Json& input) {
  Json opts = Json::object();
  if (input.is_object() && input.contains("options")) {
    opts = input["options"];
    if (!opts.is_object()) throw InputError("options: expected an object");
  }
  Settings s;
  s.mesh_n = cfg.mesh_n.value_or(count_option(opts, "mesh_n", Mesh::kDefaultNodes));
  s.k = cfg.k.value_or(count_option(opts, "k", 2));
  s.seed = cfg.seed.value_or(count_option(opts, "seed", 0));
  s.rel_tol = cfg.rel_tol.value_or(io::number_or(opts, "rel_tol", StepSpectrumOptions{}.rel_tol, "options"));
  s.sweep_tol = cfg.sweep_tol.value_or(io::number_or(opts, "sweep_tol", OptimizerOptions{}.sweep_tol, "options"));
  s.max_sweeps = cfg.max_sweeps.value_or(count_option(opts, "max_sweeps", OptimizerOptions{}.max_sweeps));
  s.curve_points = cfg.curve_points.value_or(count_option(opts, "curve_points", 2000));
  if (s.mesh_n < Mesh::kMinNodes) throw InputError("mesh_n must be at least 64");
  if (s.k < 2 || s.k > 10) throw InputError("k must lie in [2, 10]");
  if (!(s.rel_tol > 0.0) || !(s.sweep_tol >= 0.0)) throw InputError("tolerances must be positive");
  if (s.curve_points < 2) throw InputError("curve_points must be at least 2");
  return s;
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<double> with_ends(const Interval& iv, const std::vector<double>& inner, double end_value) {
  std::vector<double> out{iv.a()};
  out.insert(out.end(), inner.begin(), inner.end());
  out.push_back(iv.b());
  if (end_value == 0.0) {
    out.front() = 0.0;
    out.back() = 0.0;
  }
  return out;
}

Json run_solve(const Json& in, const Settings& s, const fs::path& dir) {
  const Problem p = io::problem_from_json(in);
  const Spectrum sp = solve(p, Mesh(p.interval(), s.mesh_n), s.k);
  std::vector<std::string> header{"x"};
  std::vector<std::vector<double>> cols{with_ends(p.interval(), sp.mesh().nodes(), 1.0)};
  for (std::size_t i = 0; i < s.k; ++i) {
    header.push_back("u" + std::to_string(i + 1));
    cols.push_back(with_ends(p.interval(), sp.u(i), 0.0));
  }
  io::write_csv(dir / "eigenfunctions.csv", header, cols);
  Json r = {{"command", "solve"},
            {"lambda", sp.lambda},
            {"gap", sp.lambda[1] - sp.lambda[0]},
            {"mesh_n", s.mesh_n},
            {"extrapolated", sp.levels.size() > 1}};
  io::write_json(dir / "result.json", r);
  return r;
}

Json run_analyze(const Json& in, const Settings& s, const fs::path& dir) {
  const Problem p = io::problem_from_json(in);
  const SpectralPair pair = solve_pair(p, Mesh(p.interval(), s.mesh_n));
  const CrossingReport cr = find_crossings(pair);
  const RatioReport rr = ratio_monotonicity(pair);
  const auto well = find_single_well(p.V(), std::max(0.0, exact_max(p.V())));
  const auto barrier = find_single_barrier(p.w(), p.w_min(), exact_max(p.w()));

  const auto x = pair.mesh.nodes();
  std::vector<double> d(x.size()), dw(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d[i] = pair.u1[i] * pair.u1[i] - pair.u2[i] * pair.u2[i];
    dw[i] = pair.lambda1 * pair.u1[i] * pair.u1[i] - pair.lambda2 * pair.u2[i] * pair.u2[i];
  }
  io::write_csv(dir / "modes.csv", {"x", "u1", "u2", "u1sq_minus_u2sq", "weighted_difference"},
                {x, pair.u1, pair.u2, d, dw});
  Json r = {{"command", "analyze"},
            {"lambda", {pair.lambda1, pair.lambda2}},
            {"gap", pair.gap()},
            {"mesh_n", s.mesh_n},
            {"crossings", io::to_json(cr)},
            {"ratio", {{"monotone", rr.monotone}, {"max_violation", rr.max_violation}, {"checked_nodes", rr.checked_nodes}}},
            {"wronskian_residual", wronskian_residual(pair, p, {2})},
            {"V_single_well", well.ok()},
            {"w_single_barrier", barrier.ok()}};
  io::write_json(dir / "analysis.json", r);
  return r;
}

Json run_secular(const Json& in, const Settings& s, const fs::path& dir) {
  const StepProblem sp = io::step_from_json(in.contains("step") ? in["step"] : in);
  StepSpectrumOptions opt;
  opt.rel_tol = s.rel_tol;
  const StepEigenvalues ev = eigenvalues_step(sp, s.k, opt);
  Json routes = Json::array(), residuals = Json::array();
  for (std::size_t i = 0; i < ev.lambda.size(); ++i) {
    routes.push_back(ev.route[i] == RootRoute::secular ? "secular" : "layered");
    residuals.push_back(nullable(ev.residual[i]));
  }
  Json r = {{"command", "secular"},
            {"step", io::to_json(sp)},
            {"lambda", ev.lambda},
            {"gap", ev.gap()},
            {"route", routes},
            {"residual", residuals},
            {"threshold", sp.threshold()},
            {"secular_layout", sp.secular_layout()},
            {"warnings", ev.warnings}};
  if (sp.secular_layout()) {
    // Residual curve from just above the threshold past the last root.
    const double lo = sp.threshold() + 1e-9 * std::max(1.0, sp.threshold());
    const double hi = std::max(ev.lambda.back(), lo) * 1.25 + 1.0;
    std::vector<double> lam(s.curve_points), F(s.curve_points);
    for (std::size_t i = 0; i < s.curve_points; ++i) {
      lam[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(s.curve_points - 1);
      F[i] = secular_residual(sp, lam[i]);
    }
    io::write_csv(dir / "residual.csv", {"lambda", "F"}, {lam, F});
  } else {
    r["warnings"].push_back("no residual curve: layout outside the secular form");
  }
  io::write_json(dir / "secular.json", r);
  return r;
}

Json run_optimize(const Json& in, const Settings& s, const fs::path& dir) {
  const SearchSpace space = io::space_from_json(in.contains("space") ? in["space"] : in);
  OptimizerOptions opt;
  opt.seed = s.seed;
  opt.sweep_tol = s.sweep_tol;
  opt.max_sweeps = s.max_sweeps;
  const Optimum o = space.family == Family::step_family ? minimize_step_family(space, opt)
                                                        : corroborate_monotone_pwc(space, space.K, opt);
  std::vector<double> it, g;
  for (const auto& t : o.trace) {
    it.push_back(static_cast<double>(t.iteration));
    g.push_back(t.gamma);
  }
  io::write_csv(dir / "trace.csv", {"iter", "gamma"}, {it, g});
  Json r = io::to_json(o);
  r["command"] = "optimize";
  r["seed"] = s.seed;
  io::write_json(dir / "optimum.json", r);
  return r;
}

Json run_liouville(const Json& in, const Settings& s, const fs::path& dir) {
  const Problem p = io::problem_from_json(in);
  const LiouvilleData d = liouville_potential(p, s.mesh_n);
  const ConvexityReport c = convexity_report(d);
  const double bound = lavine_bound(p);
  const EquivalenceReport e = eigenvalue_equivalence_check(p, s.mesh_n);
  const double gap = e.original[1] - e.original[0];
  double eq = 0.0;
  for (std::size_t i = 1; i + 1 < d.x.size(); ++i) eq = std::max(eq, std::abs(d.dpsi_dx[i]));
  io::write_csv(dir / "liouville.csv", {"xi", "psi", "dpsi_dxi", "d2psi_dxi2"}, {d.xi, d.psi, d.dpsi, d.d2psi});
  Json r = {{"command", "liouville"},
            {"L", d.L},
            {"bound", bound},
            {"convex", c.convex},
            {"min_d2psi", c.min_d2psi},
            {"x_at_min_d2psi", c.x_at_min},
            {"gap", gap},
            {"gap_transformed", e.transformed[1] - e.transformed[0]},
            {"equivalence_relative", e.max_relative},
            {"bound_holds", gap >= bound - 1e-6},
            {"equality_residual", eq}};
  io::write_json(dir / "bounds.json", r);
  return r;
}

Json run_bounds(const Json& in, const Settings& s, const fs::path& dir) {
  const Problem p = io::problem_from_json(in);
  const double bound = lavine_bound(p);
  const double L = std::sqrt(3.0) * std::numbers::pi / std::sqrt(bound);
  const Spectrum sp = solve(p, Mesh(p.interval(), s.mesh_n), 2);
  const double gap = sp.lambda[1] - sp.lambda[0];
  Json convex = nullptr;
  std::string note;
  try {
    convex = convexity_report(liouville_potential(p, s.mesh_n)).convex;
  } catch (const InputError& e) {
    note = e.what();
  }
  Json r = {{"command", "bounds"}, {"L", L}, {"bound", bound}, {"gap", gap}, {"bound_holds", gap >= bound - 1e-6},
            {"convex", convex}};
  if (!note.empty()) r["note"] = note;
  io::write_json(dir / "bounds.json", r);
  return r;
}

Json violations_json(const std::vector<Violation>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back({{"x", x.x}, {"what", x.what}});
  return out;
}

Json run_validate(const Json& in, const Settings&, const fs::path& dir) {
  const Problem p = io::problem_from_json(in);
  const double M = io::number(in, "M", "problem");
  const double nl = io::number(in, "N_less", "problem");
  const double nb = io::number(in, "N_big", "problem");
  const auto well = in.contains("V_transition")
                        ? validate_single_well(p.V(), io::number(in, "V_transition", "problem"), M)
                        : find_single_well(p.V(), M);
  const auto barrier = in.contains("w_transition")
                           ? validate_single_barrier(p.w(), io::number(in, "w_transition", "problem"), nl, nb)
                           : find_single_barrier(p.w(), nl, nb);
  Json r = {{"command", "validate"},
            {"valid", well.ok() && barrier.ok()},
            {"V", {{"single_well", well.ok()},
                   {"transition", well.ok() ? Json(well.spec->transition) : Json(nullptr)},
                   {"violations", violations_json(well.violations)}}},
            {"w", {{"single_barrier", barrier.ok()},
                   {"transition", barrier.ok() ? Json(barrier.spec->transition) : Json(nullptr)},
                   {"violations", violations_json(barrier.violations)}}}};
  io::write_json(dir / "validation.json", r);
  if (!r["valid"].get<bool>()) {
    std::string what = !well.ok() ? "V is not single-well within [0, M]" : "w is not single-barrier within [N_less, N_big]";
    throw ClassViolation(what);
  }
  return r;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [n, c] : kCommands)
    if (n == name) return c;
  return std::nullopt;
}

std::string_view command_name(Command c) {
  for (const auto& [n, cc] : kCommands)
    if (cc == c) return n;
  return "unknown";
}

std::string error_json(std::string_view error, std::string_view detail) {
  return Json{{"error", error}, {"detail", detail}}.dump();
}

namespace {

Json dispatch(const RunConfig& cfg, const Json& in) {
  const Settings s = resolve(cfg, in);
  fs::create_directories(cfg.output_dir);
  switch (cfg.command) {
    case Command::solve: return run_solve(in, s, cfg.output_dir);
    case Command::analyze: return run_analyze(in, s, cfg.output_dir);
    case Command::secular: return run_secular(in, s, cfg.output_dir);
    case Command::optimize: return run_optimize(in, s, cfg.output_dir);
    case Command::liouville: return run_liouville(in, s, cfg.output_dir);
    case Command::bounds: return run_bounds(in, s, cfg.output_dir);
    case Command::validate: return run_validate(in, s, cfg.output_dir);
  }
  throw InputError("unknown command");
}

}  // namespace

std::string execute(const RunConfig& cfg, const std::string& input_text) {
  return dispatch(cfg, io::parse(input_text, "input")).dump();
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    out << dispatch(cfg, io::read_file(cfg.input)).dump() << "\n";
    return kExitOk;
  } catch (const ClassViolation& e) {
    err << error_json("infeasible_class", e.what()) << "\n";
    return kExitInvalid;
  } catch (const InputError& e) {
    err << error_json("invalid_input", e.what()) << "\n";
    return kExitInvalid;
  } catch (const Json::exception& e) {
    err << error_json("invalid_input", e.what()) << "\n";
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << error_json("io_error", e.what()) << "\n";
    return kExitInvalid;
  } catch (const SolverError& e) {
    err << error_json("solver_failure", e.what()) << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << error_json("solver_failure", e.what()) << "\n";
    return kExitSolver;
  }
}

}  // namespace slgap::cli
