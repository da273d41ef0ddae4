#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slgap/cli.hpp"

int main(int argc, char** argv) {
  namespace c = slgap::cli;
  CLI::App app{"Spectral gap tools for weighted Dirichlet Sturm-Liouville problems"};
  app.set_version_flag("--version", "slgap 0.1.0");

  std::string command;
  c::RunConfig cfg;
  std::size_t mesh_n = 0, k = 0, max_sweeps = 0, curve_points = 0;
  std::uint64_t seed = 0;
  double rel_tol = 0, sweep_tol = 0;

  const std::vector<std::string> names{"solve", "analyze", "secular", "optimize", "liouville", "bounds", "validate"};
  app.add_option("command", command, "One of: solve analyze secular optimize liouville bounds validate")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--input,-i", cfg.input, "Input JSON file")->required();
  app.add_option("--out,-o", cfg.output_dir, "Output directory (created if missing)");
  auto* o_mesh = app.add_option("--mesh-n", mesh_n, "Mesh nodes (>= 64, default 4096)");
  auto* o_k = app.add_option("--k", k, "Eigenpairs to compute (2..10, default 2)");
  auto* o_seed = app.add_option("--seed", seed, "Seed recorded with optimizer results");
  auto* o_rel = app.add_option("--rel-tol", rel_tol, "Relative root tolerance for the secular solver");
  auto* o_sweep = app.add_option("--sweep-tol", sweep_tol, "Optimizer stopping improvement per sweep");
  auto* o_max = app.add_option("--max-sweeps", max_sweeps, "Optimizer sweep cap");
  auto* o_pts = app.add_option("--curve-points", curve_points, "Samples in residual.csv");
  app.footer("Worker threads follow SLGAP_THREADS (default: hardware concurrency).");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << c::error_json("invalid_arguments", e.what()) << "\n";
    return c::kExitInvalid;
  }

  cfg.command = *c::parse_command(command);
  if (*o_mesh) cfg.mesh_n = mesh_n;
  if (*o_k) cfg.k = k;
  if (*o_seed) cfg.seed = seed;
  if (*o_rel) cfg.rel_tol = rel_tol;
  if (*o_sweep) cfg.sweep_tol = sweep_tol;
  if (*o_max) cfg.max_sweeps = max_sweeps;
  if (*o_pts) cfg.curve_points = curve_points;
  return c::run(cfg, std::cout, std::cerr);
}
