#include "slgap/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "slgap/errors.hpp"

namespace slgap::io {

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(path + "." + key + ": missing");
  return *it;
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(path + ": must be finite");
  return v;
}

std::vector<double> number_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

bool boolean_or(const Json& j, const std::string& key, bool fallback, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw InputError(path + "." + key + ": expected true or false");
  return it->get<bool>();
}

Interval interval_from_json(const Json& j, const std::string& path) {
  const auto v = number_array(j, path);
  if (v.size() != 2) throw InputError(path + ": expected [a, b]");
  if (!(v[0] < v[1])) throw InputError(path + ": need a < b");
  return Interval(v[0], v[1]);
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(source + ": malformed JSON at " + line_column(text, e.byte == 0 ? 0 : e.byte - 1));
  }
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

double number(const Json& j, const std::string& key, const std::string& path) {
  return as_number(field(j, key, path), path + "." + key);
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  return j.contains(key) ? number(j, key, path) : fallback;
}

PiecewiseFn piecewise_from_json(const Json& j, const Interval& iv, const std::string& path) {
  if (j.is_number()) return PiecewiseFn::constant(iv, as_number(j, path));
  const auto bps = number_array(field(j, "breakpoints", path), path + ".breakpoints");
  const Json& pj = field(j, "pieces", path);
  if (!pj.is_array()) throw InputError(path + ".pieces: expected an array of coefficient arrays");
  std::vector<std::vector<double>> pieces;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    const std::string pp = path + ".pieces[" + std::to_string(i) + "]";
    pieces.push_back(number_array(pj[i], pp));
    if (pieces.back().empty()) throw InputError(pp + ": needs at least one coefficient");
    if (pieces.back().size() > PiecewiseFn::kMaxDegree + 1) throw InputError(pp + ": degree exceeds 16");
  }
  if (bps.size() != pieces.size() + 1) throw InputError(path + ": breakpoint count must be piece count + 1");
  if (bps.front() != iv.a() || bps.back() != iv.b())
    throw InputError(path + ".breakpoints: must start at a and end at b of the interval");
  std::string basis = "global";
  if (j.contains("basis")) {
    if (!j["basis"].is_string()) throw InputError(path + ".basis: expected \"global\" or \"local\"");
    basis = j["basis"].get<std::string>();
  }
  try {
    if (basis == "global") return PiecewiseFn::from_global(bps, pieces);
    if (basis == "local") return PiecewiseFn::from_local(bps, pieces);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
  throw InputError(path + ".basis: expected \"global\" or \"local\"");
}

Json to_json(const PiecewiseFn& f) {
  Json pieces = Json::array();
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    const auto c = f.local_coefficients(i);
    pieces.push_back(std::vector<double>(c.begin(), c.end()));
  }
  const auto b = f.breakpoints();
  return {{"basis", "local"}, {"breakpoints", std::vector<double>(b.begin(), b.end())}, {"pieces", pieces}};
}

Problem problem_from_json(const Json& j) {
  const Interval iv = interval_from_json(field(j, "interval", "problem"), "problem.interval");
  PiecewiseFn V = piecewise_from_json(field(j, "V", "problem"), iv, "problem.V");
  PiecewiseFn w = piecewise_from_json(field(j, "w", "problem"), iv, "problem.w");
  std::optional<PiecewiseFn> V0;
  if (j.contains("V0") && !j["V0"].is_null()) V0 = piecewise_from_json(j["V0"], iv, "problem.V0");
  return Problem(std::move(V), std::move(w), std::move(V0));
}

StepProblem step_from_json(const Json& j) {
  const std::string p = "step";
  if (!j.is_object()) throw InputError(p + ": expected an object");
  StepProblem sp;
  if (j.contains("interval")) sp.interval = interval_from_json(j["interval"], p + ".interval");
  sp.x_minus = number(j, "x_minus", p);
  sp.v_max = number_or(j, "v_max", 0.0, p);
  sp.xhat_minus = number(j, "xhat_minus", p);
  sp.n_big = number_or(j, "n_big", 1.0, p);
  sp.w_low = number_or(j, "w_low", sp.n_big, p);
  sp.reflected = boolean_or(j, "reflected", false, p);
  sp.density_high_first = boolean_or(j, "density_high_first", true, p);
  sp.validate();
  return sp;
}

Json to_json(const StepProblem& sp) {
  return {{"interval", {sp.interval.a(), sp.interval.b()}},
          {"x_minus", sp.x_minus},
          {"v_max", sp.v_max},
          {"xhat_minus", sp.xhat_minus},
          {"n_big", sp.n_big},
          {"w_low", sp.w_low},
          {"reflected", sp.reflected},
          {"density_high_first", sp.density_high_first}};
}

SearchSpace space_from_json(const Json& j) {
  const std::string p = "space";
  if (!j.is_object()) throw InputError(p + ": expected an object");
  SearchSpace s;
  if (j.contains("interval")) s.interval = interval_from_json(j["interval"], p + ".interval");
  s.M = number(j, "M", p);
  s.n_less = number_or(j, "N_less", 1.0, p);
  s.n_big = number_or(j, "N_big", s.n_less, p);
  if (j.contains("family")) {
    if (!j["family"].is_string()) throw InputError(p + ".family: expected a string");
    const auto f = j["family"].get<std::string>();
    if (f == "step_family")
      s.family = Family::step_family;
    else if (f == "monotone_pwc")
      s.family = Family::monotone_pwc;
    else
      throw InputError(p + ".family: expected \"step_family\" or \"monotone_pwc\"");
  }
  if (j.contains("K")) {
    if (!j["K"].is_number_unsigned()) throw InputError(p + ".K: expected a positive integer");
    s.K = j["K"].get<std::size_t>();
  }
  s.validate();
  return s;
}

Json to_json(const SearchSpace& s) {
  return {{"interval", {s.interval.a(), s.interval.b()}},
          {"M", s.M},
          {"N_less", s.n_less},
          {"N_big", s.n_big},
          {"family", s.family == Family::step_family ? "step_family" : "monotone_pwc"},
          {"K", s.K}};
}

Json to_json(const CrossingReport& r) {
  return {{"x_minus", r.x_minus},
          {"x_plus", r.x_plus},
          {"xhat_minus", r.xhat_minus},
          {"xhat_plus", r.xhat_plus},
          {"crossing_counts", {r.crossing_counts[0], r.crossing_counts[1]}},
          {"ratio_monotone", r.ratio_monotone},
          {"ratio_max_violation", r.ratio_max_violation},
          {"weighted_anomaly", r.weighted_anomaly}};
}

Json to_json(const Optimum& o) {
  Json j = {{"space", to_json(o.space)},
            {"gamma", o.gamma},
            {"lambda", {o.lambda1, o.lambda2}},
            {"V_star", to_json(o.V_star)},
            {"w_star", to_json(o.w_star)},
            {"stationarity", o.stationarity},
            {"evaluations", o.evaluations},
            {"converged", o.converged},
            {"sweeps", o.trace.empty() ? 0 : o.trace.back().iteration}};
  j["step"] = o.step ? to_json(*o.step) : Json(nullptr);
  return j;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw InputError("CSV header and column count differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw InputError("CSV columns must have equal length");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot write");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_field(header[i]);
  out << "\r\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << format(columns[i][r]);
    out << "\r\n";
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot write");
  out << j.dump(2) << "\n";
}

}  // namespace slgap::io
