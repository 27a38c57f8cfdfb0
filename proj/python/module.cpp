// Python bindings. JSON-shaped results cross the boundary as plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

#include "wgm/config.hpp"
#include "wgm/cqed.hpp"
#include "wgm/errors.hpp"
#include "wgm/spt.hpp"
#include "wgm/sweep.hpp"
#include "wgm/transfer_matrix.hpp"

namespace py = pybind11;
using namespace wgm;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

SweepSpec spec_from(const LoadedConfig& c, const std::optional<std::string>& methods, std::optional<int> points,
                    std::optional<std::pair<double, double>> range, const std::optional<std::string>& direction,
                    std::optional<int> master_stride) {
    SweepSpec s = c.sweep;
    if (methods) s.methods = parse_method_list(*methods);
    if (points) s.points = *points;
    if (range) {
        s.min_over_kappa_tot = range->first;
        s.max_over_kappa_tot = range->second;
    }
    if (direction) {
        if (*direction == "both")
            s.directions = {Direction::Forward, Direction::Backward};
        else
            s.directions = {parse_direction(*direction)};
    }
    if (master_stride) s.master_stride = *master_stride;
    s.validate();
    return s;
}

double point(const LoadedConfig& c, const std::string& method, double delta1_over_kappa_tot) {
    const SystemConfig& cfg = c.system;
    const double delta = delta1_over_kappa_tot * cfg.rates.kappa_tot();
    switch (parse_method(method)) {
        case Method::Tm: return std::norm(tm::transmission(cfg, delta));
        case Method::Spt: return spt::spt_power(spt::make_input(cfg, delta));
        case Method::CqedSemiclassical:
            return std::norm(cqed::semiclassical_transmission(cfg, delta, cfg.emitter_detuning(delta)));
        case Method::CqedMaster:
            return cqed::master_equation_transmission(cfg, c.sweep.truncation, delta).transmission;
    }
    throw DomainError("unknown method");
}

}  // namespace

PYBIND11_MODULE(wgmtransport, m) {
    m.doc() = "Single-photon transport through a WGM ring with a chiral emitter and a backscatterer";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<LoadedConfig>(m, "Config")
        .def_property_readonly("warnings", [](const LoadedConfig& c) { return c.warnings; })
        .def_property_readonly("source", [](const LoadedConfig& c) { return to_py(c.source); })
        .def("describe", [](const LoadedConfig& c) { return to_py(describe(c.system)); })
        .def_property_readonly("kappa_tot", [](const LoadedConfig& c) { return c.system.rates.kappa_tot(); },
                               "Total cavity decay rate in rad/s");

    m.def("load_config", [](const std::filesystem::path& p) { return load_config(p); }, py::arg("path"));
    m.def("parse_config", [](const py::object& doc) { return parse_config(from_py(doc)); }, py::arg("document"));

    m.def("methods", [] {
        std::vector<std::string> out;
        for (Method x : kAllMethods) out.emplace_back(to_string(x));
        return out;
    });

    m.def("transmission", &point, py::arg("config"), py::arg("method"), py::arg("delta1_over_kappa_tot"),
          "Power transmission |t|^2 of one method at one cavity detuning");

    m.def(
        "run_sweep",
        [](const LoadedConfig& c, std::optional<std::string> methods, std::optional<int> points,
           std::optional<std::pair<double, double>> range, std::optional<std::string> direction,
           std::optional<int> master_stride, unsigned threads) {
            const SweepSpec s = spec_from(c, methods, points, range, direction, master_stride);
            SweepOptions o;
            o.threads = threads;
            Spectrum out;
            {
                py::gil_scoped_release release;
                out = run_sweep(c.system, s, o, c.source);
            }
            return to_py(to_json(out));
        },
        py::arg("config"), py::arg("methods") = py::none(), py::arg("points") = py::none(),
        py::arg("range") = py::none(), py::arg("direction") = py::none(), py::arg("master_stride") = py::none(),
        py::arg("threads") = 0u);

    m.def(
        "compare",
        [](const py::object& spectrum, std::optional<double> tolerance) {
            CompareOptions o;
            if (tolerance) o.default_tolerance = *tolerance;
            return to_py(compare_report(spectrum_from_json(from_py(spectrum)), o).to_json());
        },
        py::arg("spectrum"), py::arg("default_tolerance") = py::none());

    m.def(
        "chirality",
        [](const LoadedConfig& c, std::optional<std::string> methods, std::optional<int> points) {
            const SweepSpec s = spec_from(c, methods, points, std::nullopt, std::nullopt, std::nullopt);
            return to_py(chirality_report(c.system, s, {}, c.source).to_json());
        },
        py::arg("config"), py::arg("methods") = py::none(), py::arg("points") = py::none());
}
