#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace slgap::cli {

enum class Command { solve, analyze, secular, optimize, liouville, bounds, validate };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command c);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitSolver = 3;

/// Unset overrides fall back to the input's "options" object, then to the
/// module defaults.
struct RunConfig {
  Command command = Command::solve;
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  std::optional<std::size_t> mesh_n;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
  std::optional<double> rel_tol;
  std::optional<double> sweep_tol;
  std::optional<std::size_t> max_sweeps;
  std::optional<std::size_t> curve_points;
};

/// Runs one command, writing artifacts under output_dir and the main result
/// JSON to `out`. Failures print {"error", "detail"} to `err` and return
/// kExitInvalid (bad input, infeasible classes) or kExitSolver.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Runs one command on JSON text (cfg.input is ignored) and returns the
/// compact result JSON. Errors propagate as InputError, SolverError or
/// std::filesystem::filesystem_error.
std::string execute(const RunConfig& cfg, const std::string& input_text);

/// The {"error", "detail"} line printed on failure.
std::string error_json(std::string_view error, std::string_view detail);

}  // namespace slgap::cli
