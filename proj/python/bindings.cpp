#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "slgap/cli.hpp"
#include "slgap/errors.hpp"

namespace py = pybind11;
namespace c = slgap::cli;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral gap tools for weighted Dirichlet Sturm-Liouville problems";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    }
  });

  m.attr("COMMANDS") = py::make_tuple("solve", "analyze", "secular", "optimize", "liouville", "bounds", "validate");

  m.def(
      "execute",
      [](const std::string& command, const std::string& input, const std::filesystem::path& out_dir,
         std::optional<std::size_t> mesh_n, std::optional<std::size_t> k, std::optional<std::uint64_t> seed,
         std::optional<double> rel_tol, std::optional<double> sweep_tol, std::optional<std::size_t> max_sweeps,
         std::optional<std::size_t> curve_points) {
        const auto cmd = c::parse_command(command);
        if (!cmd) throw slgap::InputError("unknown command: " + command);
        c::RunConfig cfg;
        cfg.command = *cmd;
        cfg.output_dir = out_dir;
        cfg.mesh_n = mesh_n;
        cfg.k = k;
        cfg.seed = seed;
        cfg.rel_tol = rel_tol;
        cfg.sweep_tol = sweep_tol;
        cfg.max_sweeps = max_sweeps;
        cfg.curve_points = curve_points;
        py::gil_scoped_release release;
        return c::execute(cfg, input);
      },
      py::arg("command"), py::arg("input"), py::arg("out_dir"), py::kw_only(), py::arg("mesh_n") = py::none(),
      py::arg("k") = py::none(), py::arg("seed") = py::none(), py::arg("rel_tol") = py::none(),
      py::arg("sweep_tol") = py::none(), py::arg("max_sweeps") = py::none(), py::arg("curve_points") = py::none(),
      "Run one command on JSON text, writing artifacts under out_dir. Returns the result JSON text.");
}
