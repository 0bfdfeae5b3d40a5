#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "vawt/errors.hpp"
#include "vawt/fastsum.hpp"
#include "vawt/harness.hpp"

namespace py = pybind11;
using namespace vawt;

namespace {

std::vector<PointVortex> to_vortices(py::array_t<double, py::array::c_style | py::array::forcecast> positions,
                                     py::array_t<double, py::array::c_style | py::array::forcecast> gammas,
                                     double core_radius) {
    if (positions.ndim() != 2 || positions.shape(1) != 2)
        throw std::invalid_argument("positions must have shape (n, 2)");
    if (gammas.ndim() != 1 || gammas.shape(0) != positions.shape(0))
        throw std::invalid_argument("gammas must have shape (n,)");
    if (!(core_radius > 0.0)) throw std::invalid_argument("core_radius must be positive");
    auto p = positions.unchecked<2>();
    auto g = gammas.unchecked<1>();
    std::vector<PointVortex> out(static_cast<std::size_t>(positions.shape(0)));
    for (py::ssize_t k = 0; k < positions.shape(0); ++k) out[k] = {{p(k, 0), p(k, 1)}, g(k), core_radius};
    return out;
}

py::array_t<double> induced(const std::vector<PointVortex>& vortices,
                            py::array_t<double, py::array::c_style | py::array::forcecast> targets,
                            double theta_open, bool exact) {
    if (targets.ndim() != 2 || targets.shape(1) != 2)
        throw std::invalid_argument("targets must have shape (m, 2)");
    const VortexTree tree = exact ? VortexTree{} : VortexTree::build(vortices);
    auto t = targets.unchecked<2>();
    py::array_t<double> out({targets.shape(0), py::ssize_t{2}});
    auto o = out.mutable_unchecked<2>();
    for (py::ssize_t k = 0; k < targets.shape(0); ++k) {
        const Vec2 x{t(k, 0), t(k, 1)};
        const Vec2 u = exact ? direct_sum(vortices, x) : tree.eval(x, theta_open);
        o(k, 0) = u.x;
        o(k, 1) = u.y;
    }
    return out;
}

py::dict series_arrays(const ForceSeries& s) {
    const auto n = static_cast<py::ssize_t>(s.samples.size());
    py::array_t<int> rev(n), blade(n);
    py::array_t<double> az(n), fn(n), total(n);
    for (py::ssize_t k = 0; k < n; ++k) {
        const auto& x = s.samples[static_cast<std::size_t>(k)];
        rev.mutable_at(k) = x.rev;
        az.mutable_at(k) = x.azimuth_deg;
        blade.mutable_at(k) = x.blade;
        fn.mutable_at(k) = x.fn_per_span;
        total.mutable_at(k) = x.fn_total;
    }
    py::dict d;
    d["rev"] = rev;
    d["azimuth_deg"] = az;
    d["blade"] = blade;
    d["fn_per_span"] = fn;
    d["fn_total"] = total;
    return d;
}

}  // namespace

PYBIND11_MODULE(_vawtsim, m) {
    m.doc() = "Two-dimensional vertical-axis wind turbine force models";

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<StepError>(m, "StepError", PyExc_RuntimeError);

    py::class_<TurbineGeometry>(m, "TurbineGeometry")
        .def(py::init<>())
        .def_readwrite("radius", &TurbineGeometry::radius)
        .def_readwrite("blade_count", &TurbineGeometry::blade_count)
        .def_readwrite("blade_length", &TurbineGeometry::blade_length)
        .def_readwrite("chord_mid", &TurbineGeometry::chord_mid)
        .def_readwrite("tip_chord", &TurbineGeometry::tip_chord)
        .def_readwrite("taper_length", &TurbineGeometry::taper_length)
        .def_readwrite("pitch_angle", &TurbineGeometry::pitch_angle)
        .def_readwrite("hub_height", &TurbineGeometry::hub_height)
        .def_readwrite("swept_area", &TurbineGeometry::swept_area)
        .def("validate", &TurbineGeometry::validate);

    py::class_<OperatingPoint>(m, "OperatingPoint")
        .def(py::init<>())
        .def_readwrite("omega", &OperatingPoint::omega)
        .def_readwrite("u_inf", &OperatingPoint::u_inf)
        .def_readwrite("rho", &OperatingPoint::rho);

    m.def("tip_speed_ratio", &tip_speed_ratio, py::arg("operating"), py::arg("geometry"));
    m.def("rpm_to_rad_per_s", &rpm_to_rad_per_s);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("geometry", &Scenario::geometry)
        .def_readwrite("operating", &Scenario::operating)
        .def_property(
            "model", [](const Scenario& s) { return std::string(to_string(s.model)); },
            [](Scenario& s, const std::string& v) { s.model = parse_model(v); })
        .def_readwrite("steps_per_rev", &Scenario::steps_per_rev)
        .def_readwrite("revolutions", &Scenario::revolutions)
        .def_property(
            "theta_open", [](const Scenario& s) { return s.vortex.theta_open; },
            [](Scenario& s, double v) { s.vortex.theta_open = v; })
        .def_property_readonly("tip_speed_ratio",
                               [](const Scenario& s) { return tip_speed_ratio(s.operating, s.geometry); })
        .def_property_readonly("hash", &scenario_hash)
        .def("validate", &Scenario::validate);

    m.def("load_config", &load_config, py::arg("path"));
    m.def(
        "parse_config",
        [](const std::string& text) {
            std::istringstream in(text);
            return parse_config(in);
        },
        py::arg("text"));

    py::class_<ForceSeries>(m, "ForceSeries")
        .def_readonly("model", &ForceSeries::model)
        .def_readonly("label", &ForceSeries::label)
        .def_readonly("scenario_hash", &ForceSeries::scenario_hash)
        .def_readonly("tip_speed_ratio", &ForceSeries::tip_speed_ratio)
        .def_readonly("steps_per_rev", &ForceSeries::steps_per_rev)
        .def_readonly("blade_count", &ForceSeries::blade_count)
        .def("__len__", [](const ForceSeries& s) { return s.samples.size(); })
        .def("arrays", &series_arrays, "Samples as a dict of numpy arrays")
        .def("to_csv", [](const ForceSeries& s) {
            std::ostringstream out;
            write_csv(s, out);
            return out.str();
        });

    m.def("run_scenario", &run_scenario, py::arg("scenario"), py::call_guard<py::gil_scoped_release>());
    m.def("save_series", &save_series, py::arg("series"), py::arg("path"));
    m.def("load_series", &load_series, py::arg("path"));
    m.def(
        "compare",
        [](const ForceSeries& a, const ForceSeries& b, int bins) {
            const ComparisonReport r = compare(a, b, bins);
            return py::module_::import("json").attr("loads")(r.to_json());
        },
        py::arg("a"), py::arg("b"), py::arg("bins") = 72);
    m.def("emit_plot", &emit_plot, py::arg("series"), py::arg("path"));

    py::class_<PolarTable>(m, "PolarTable")
        .def_static("load", &PolarTable::load, py::arg("path"))
        .def_static("bundled_naca0021", &bundled_naca0021)
        .def_property_readonly("name", &PolarTable::airfoil_name)
        .def_property_readonly("symmetric", &PolarTable::symmetric)
        .def("lookup", [](const PolarTable& t, double alpha) {
            const LiftDrag c = t.lookup(alpha);
            return py::make_tuple(c.cl, c.cd);
        }, py::arg("alpha"));

    m.def(
        "induced_velocity",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> positions,
           py::array_t<double, py::array::c_style | py::array::forcecast> gammas,
           py::array_t<double, py::array::c_style | py::array::forcecast> targets, double core_radius,
           double theta_open, bool exact) {
            return induced(to_vortices(positions, gammas, core_radius), targets, theta_open, exact);
        },
        py::arg("positions"), py::arg("gammas"), py::arg("targets"), py::arg("core_radius") = 0.1,
        py::arg("theta_open") = 0.5, py::arg("exact") = false,
        "Regularized Biot-Savart velocity at each target, via the quadtree unless exact=True.");
}
