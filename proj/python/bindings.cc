// Copyright 2026 The rotecho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <numbers>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rotecho/channels.h"
#include "rotecho/echo.h"
#include "rotecho/errors.h"
#include "rotecho/fit.h"
#include "rotecho/heat.h"
#include "rotecho/qv.h"
#include "rotecho/spectator.h"

namespace py = pybind11;
using namespace rotecho;

namespace {

CrCoefficients coefficients(const std::map<std::string, double> &nu) {
    CrCoefficients c;
    for (const auto &[label, value] : nu) {
        c.set(label, value);
    }
    return c;
}

SweepDataset dataset(const std::vector<std::tuple<double, std::string, double>> &rows) {
    SweepDataset ds;
    for (const auto &[x, obs, value] : rows) {
        ds.rows.push_back({x, obs, value, 1.0});
    }
    return ds;
}

std::vector<std::tuple<double, std::string, double>> rows(const SweepDataset &ds) {
    std::vector<std::tuple<double, std::string, double>> out;
    for (const auto &r : ds.rows) {
        out.emplace_back(r.x, r.observable, r.value);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Echoed cross-resonance simulation and analysis.";

    auto base = py::register_exception<Error>(m, "RotechoError", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<OutOfScope>(m, "OutOfScope", base.ptr());
    py::register_exception<NearResonance>(m, "NearResonance", base.ptr());

    m.def(
        "echo_unitary", [](const std::map<std::string, double> &nu, double t) { return echo_unitary(coefficients(nu), t); },
        py::arg("nu"), py::arg("t"), "Echoed gate for single-tone coefficients {label: rad/s}.");
    m.def(
        "echo_nu_tilde",
        [](const std::map<std::string, double> &nu, double t) { return echo_coefficients(coefficients(nu), t).nu_tilde; },
        py::arg("nu"), py::arg("t"), "Echoed generator coefficients in rad/s.");
    m.def(
        "calibrate_zx",
        [](const std::map<std::string, double> &nu, double t) {
            CrCoefficients base_c = coefficients(nu);
            auto family = [base_c](double s) {
                CrCoefficients c = base_c;
                c.nu_zx = s;
                return c;
            };
            ZxCalibration cal = calibrate_zx(family, t, base_c.nu_zx != 0 ? base_c.nu_zx : std::numbers::pi / 4 / t);
            return py::make_tuple(cal.knob, cal.converged, cal.report.nu_tilde);
        },
        py::arg("nu"), py::arg("t"), "Quarter-turn ZX calibration: (nu_zx, converged, nu_tilde).");
    m.def(
        "heat_echo_nu_tilde",
        [](const CMatrix &u, std::vector<int> reps, int n, double t_half, int zx_sign) {
            HeatConfig cfg;
            cfg.reps = std::move(reps);
            return heat_echo_nu_tilde(u, cfg, n, t_half, zx_sign);
        },
        py::arg("u"), py::arg("reps") = std::vector<int>{2, 4, 8}, py::arg("n") = 8, py::arg("t_half"),
        py::arg("zx_sign") = 1);

    m.def("static_zz", &static_zz, py::arg("j_coupling"), py::arg("delta1"), py::arg("delta2"), py::arg("detuning"));
    m.def(
        "rotary_suppression",
        [](double xi, double omega, double t) {
            SpectatorTerms s = rotary_suppression(xi, omega, t);
            return py::make_tuple(s.nu_yz, s.nu_zz);
        },
        py::arg("xi"), py::arg("omega"), py::arg("t"));
    m.def(
        "spectator_numeric_terms",
        [](double xi, double omega, double t) {
            SpectatorTerms s = spectator_numeric_terms(xi, omega, t);
            return py::make_tuple(s.nu_yz, s.nu_zz);
        },
        py::arg("xi"), py::arg("omega"), py::arg("t"));

    m.def(
        "depolarizing_ptm", [](double lambda, std::size_t n) { return depolarizing_ptm(lambda, n).r; },
        py::arg("survival"), py::arg("num_qubits"));
    m.def(
        "damping_ptm", [](double ga, double gp) { return damping_ptm(ga, gp).r; }, py::arg("gamma_a"),
        py::arg("gamma_p"));
    m.def(
        "ptm_from_unitary", [](const CMatrix &u) { return ptm_from_unitary(u).r; }, py::arg("u"));
    m.def(
        "ptm_tensor", [](const RMatrix &a, const RMatrix &b) { return tensor(PTMatrix(a), PTMatrix(b)).r; });
    m.def(
        "ptm_compose", [](const RMatrix &after, const RMatrix &before) {
            return compose(PTMatrix(after), PTMatrix(before)).r;
        });
    m.def(
        "unitarity", [](const RMatrix &r) { return unitarity_ptm(PTMatrix(r)); }, py::arg("ptm"));
    m.def("unitarity_independent", &unitarity_independent, py::arg("gammas"));
    m.def(
        "unitarity_report",
        [](const RMatrix &r, const std::vector<std::size_t> &blocks) {
            UnitarityReport rep = unitarity_report(PTMatrix(r), blocks);
            py::dict d;
            d["u_full"] = rep.u_full;
            d["u_sub"] = rep.u_sub;
            d["u_product"] = rep.u_product;
            d["e_entanglement"] = rep.e_entanglement;
            return d;
        },
        py::arg("ptm"), py::arg("block_qubits"));
    m.def(
        "purity_rb",
        [](const RMatrix &r, const std::vector<int> &lengths, int n_sequences, std::uint64_t seed) {
            RbDecayFit fit = purity_rb(PTMatrix(r), {lengths, n_sequences, seed, std::nullopt});
            py::dict d;
            d["u_hat"] = fit.u_hat;
            d["a_offset"] = fit.a_offset;
            d["b_scale"] = fit.b_scale;
            d["mean_purity"] = fit.mean_purity;
            return d;
        },
        py::arg("ptm"), py::arg("lengths"), py::arg("n_sequences") = 200, py::arg("seed") = 1);
    m.def("unitary_entanglement", &unitary_entanglement, py::arg("u"), py::arg("d1"), py::arg("d2"));

    py::class_<ThetaModel>(m, "ThetaModel")
        .def_static("reference_2q", &ThetaModel::reference_2q)
        .def_static("reference_3q", &ThetaModel::reference_3q)
        .def_static("from_json", [](const std::string &s) { return ThetaModel::from_json(nlohmann::json::parse(s)); })
        .def("to_json", [](const ThetaModel &m) { return m.to_json().dump(); })
        .def_property_readonly("qubit_count", &ThetaModel::qubit_count)
        .def_property_readonly("t_pulse", &ThetaModel::t_pulse)
        .def("angle", &ThetaModel::angle, py::arg("label"), py::arg("x"))
        .def("term", [](const ThetaModel &m, const std::string &label) {
            const ThetaTerm &t = m.term(label);
            return py::make_tuple(t.theta0, t.theta1, t.theta2, t.odd);
        });
    m.def(
        "synthesize_sweep",
        [](const ThetaModel &model, const std::vector<double> &grid) { return rows(synthesize_sweep(model, grid)); },
        py::arg("model"), py::arg("x_grid"), "Rows (x, observable, nu_tilde rad/s).");
    m.def(
        "fit_theta",
        [](const std::vector<std::tuple<double, std::string, double>> &data, const ThetaModel &init,
           const std::vector<std::pair<std::string, int>> &free, int restarts) {
            std::vector<ThetaParam> params;
            for (const auto &[label, order] : free) {
                params.push_back({label, order});
            }
            if (params.empty()) {
                params = init.qubit_count() == 2 ? reference_mask_2q() : reference_mask_3q();
            }
            FitOptions opts;
            opts.restarts = restarts;
            ThetaFit fit = fit_theta(dataset(data), params, init, opts);
            return py::make_tuple(fit.model, fit.converged, fit.rms_khz);
        },
        py::arg("data"), py::arg("init"), py::arg("free") = std::vector<std::pair<std::string, int>>{},
        py::arg("restarts") = 4, "Returns (model, converged, rms_khz). Empty free selects the reference mask.");

    m.def(
        "heavy_set", [](const std::vector<double> &p) { return heavy_set(p); }, py::arg("probabilities"));
    m.def(
        "hop",
        [](int width, int circuits, std::uint64_t seed, const std::string &label, double angle) {
            QvNoise noise = angle == 0 ? QvNoise{} : qv_coherent_error(PauliLabel(label), angle);
            HopResult r = hop_estimate(generate_circuits(width, circuits, seed), noise);
            py::dict d;
            d["mean_hop"] = r.mean_hop;
            d["sigma"] = r.sigma;
            d["passed"] = r.passed;
            d["per_circuit"] = r.per_circuit;
            return d;
        },
        py::arg("width"), py::arg("circuits"), py::arg("seed") = 1, py::arg("label") = "IY", py::arg("angle") = 0.0,
        "Exact-expectation heavy-output probability with a coherent error after every block.");
}
