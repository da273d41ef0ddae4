#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "slgap/coefficients.hpp"
#include "slgap/crossing.hpp"
#include "slgap/optimizer.hpp"
#include "slgap/sl_solver.hpp"
#include "slgap/step_spectrum.hpp"

namespace slgap::io {

using Json = nlohmann::json;

/// Parses text; syntax errors become InputError with line and column.
Json parse(const std::string& text, const std::string& source);
Json read_file(const std::filesystem::path& path);

/// {"breakpoints": [...], "pieces": [[c0, c1, ...], ...], "basis": "global" | "local"}
/// or a bare number (constant on `iv`). Coefficients default to the global basis.
/// Errors name the offending field through `path`.
PiecewiseFn piecewise_from_json(const Json& j, const Interval& iv, const std::string& path);
/// Local basis, exact.
Json to_json(const PiecewiseFn& f);

/// {"interval": [a, b], "V": fn, "w": fn, "V0": fn (optional)}
Problem problem_from_json(const Json& j);

/// Fields of StepProblem; interval defaults to [0, pi].
StepProblem step_from_json(const Json& j);
Json to_json(const StepProblem& sp);

/// {"M", "N_less", "N_big", "family": "step_family" | "monotone_pwc", "K", "interval"}
SearchSpace space_from_json(const Json& j);
Json to_json(const SearchSpace& s);

Json to_json(const CrossingReport& r);
Json to_json(const Optimum& o);

/// RFC 4180 CSV (CRLF line ends) with a header row. Columns must have equal
/// length; values are written with 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
/// Pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

/// Number at j[key] (or `fallback` when absent).
double number(const Json& j, const std::string& key, const std::string& path);
double number_or(const Json& j, const std::string& key, double fallback, const std::string& path);

}  // namespace slgap::io
