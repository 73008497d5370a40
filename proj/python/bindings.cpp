#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "nvisc/app.hpp"
#include "nvisc/config.hpp"
#include "nvisc/error.hpp"
#include "nvisc/inference.hpp"
#include "nvisc/mixing.hpp"
#include "nvisc/psb.hpp"
#include "nvisc/rates.hpp"

namespace py = pybind11;
using namespace nvisc;

namespace {

py::tuple grid_tuple(const GridFunction& g) {
    std::vector<double> omega(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) omega[i] = g.omega_at(i);
    return py::make_tuple(omega, std::vector<double>(g.values().begin(), g.values().end()));
}

py::list intervals_list(const IntervalSet& s) {
    py::list out;
    for (const auto& iv : s.intervals()) out.append(py::make_tuple(iv.lo, iv.hi));
    return out;
}

py::dict rate_dict(const rates::RateResult& r) {
    py::dict d;
    d["value_mhz"] = r.value_mhz;
    d["lo_mhz"] = r.lo();
    d["hi_mhz"] = r.hi();
    d["flagged"] = r.flagged;
    d["note"] = r.note;
    return d;
}

// loaded config plus the model and F(., 0) it implies
struct Session {
    config::RunConfig cfg;
    psb::PsbModel model;
    GridFunction F0;

    explicit Session(const std::filesystem::path& path)
        : cfg(config::read_config(path)),
          model(psb::load_model(cfg.psb_manifest, cfg.grid_step_mev)),
          F0(psb::thermal_overlap(model, Temperature(0.0))) {}
};

}  // namespace

PYBIND11_MODULE(_nvisc, m) {
    m.doc() = "NV-centre intersystem-crossing rates and inference";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<EmptyResultError>(m, "EmptyResultError", PyExc_LookupError);

    m.def("ghz_to_mev", &units::ghz_to_mev);
    m.def("lifetime_ns", &units::lifetime_ns, py::arg("gamma_over_2pi_mhz"));
    m.def("alpha_const", &mixing::alpha_const, py::arg("x_delta"));

    m.def(
        "gamma_mix",
        [](double eta, double delta_xy_ghz, double temperature_k) {
            const auto mp = mixing::MixingParams::make(MeasuredBand::point(eta), units::ghz_to_mev(delta_xy_ghz),
                                                       Temperature(temperature_k));
            return mixing::gamma_mix(mp).value_mhz;
        },
        py::arg("eta_mhz_per_mev3"), py::arg("delta_xy_ghz"), py::arg("temperature_k"));

    m.def(
        "thermal_overlap",
        [](const std::filesystem::path& manifest, double temperature_k) {
            return grid_tuple(psb::thermal_overlap(psb::load_model(manifest), Temperature(temperature_k)));
        },
        py::arg("manifest"), py::arg("temperature_k") = 0.0, "Returns (omega_mev, values).");

    py::class_<Session>(m, "Session")
        .def(py::init<const std::filesystem::path&>(), py::arg("config_path"))
        .def("overlap", [](const Session& s) { return grid_tuple(s.F0); })
        .def("gamma_a1",
             [](const Session& s, std::optional<double> delta) {
                 return rate_dict(rates::gamma_a1(s.cfg.spin_orbit(), s.F0, delta.value_or(s.cfg.delta_mev)));
             },
             py::arg("delta_mev") = py::none())
        .def("e12_a1_ratio",
             [](const Session& s) {
                 const auto r = rates::e12_a1_ratio(s.cfg.coupling(), s.F0, s.cfg.spacings(), s.cfg.singlet_path);
                 return py::make_tuple(r.value, r.lo, r.hi);
             })
        .def("infer_delta",
             [](const Session& s) {
                 const auto r = inference::infer_delta(s.cfg.spin_orbit(), s.F0, s.cfg.gamma_a1_target_mhz,
                                                       s.cfg.exclusion_floor_mev, s.cfg.delta_sweep);
                 py::dict d;
                 d["intervals"] = intervals_list(r.intervals);
                 d["before_exclusion"] = intervals_list(r.before_exclusion);
                 return d;
             })
        .def("infer_omega",
             [](const Session& s) {
                 const auto r = inference::infer_omega(s.cfg.coupling(), s.F0,
                                                       s.cfg.delta_range,
                                                       s.cfg.delta_prime_mev, s.cfg.ratio_target, s.cfg.singlet_path);
                 return intervals_list(r.intervals);
             })
        .def("isc_sensitivity",
             [](const Session& s) {
                 return inference::isc_sensitivity(s.cfg.spin_orbit(), s.cfg.coupling(), s.F0, s.cfg.spacings(),
                                                   s.cfg.sensitivity_step_mev);
             });

    m.def("commands", &app::commands);
    m.def(
        "run",
        [](const std::string& command, const std::filesystem::path& config_path, const std::filesystem::path& out) {
            std::ostringstream log, err;
            const int code = app::run_guarded(command, config_path, {out, std::nullopt, true}, std::nullopt, log, err);
            return py::make_tuple(code, err.str());
        },
        py::arg("command"), py::arg("config_path"), py::arg("out_dir"),
        "Runs a CLI command; returns (exit_code, error_text).");
}
