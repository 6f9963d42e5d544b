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

#include "rotecho/cr_hamiltonian.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include "rotecho/errors.h"
#include "rotecho/units.h"

namespace rotecho {

namespace {

void check_keys(const nlohmann::json &j, const std::set<std::string> &allowed, const std::string &where) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected a JSON object");
    }
    for (const auto &[key, _] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

double number_at(const nlohmann::json &j, const std::string &key, const std::string &where) {
    if (!j.contains(key)) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    if (!j.at(key).is_number()) {
        throw ConfigError(where + ": key '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

double optional_number(const nlohmann::json &j, const std::string &key, const std::string &where) {
    return j.contains(key) ? number_at(j, key, where) : 0.0;
}

bool is_cr_label(std::string_view label) {
    const auto &all = CrCoefficients::labels();
    return std::find(all.begin(), all.end(), label) != all.end();
}

}  // namespace

const std::array<std::string_view, 7> &CrCoefficients::labels() {
    static const std::array<std::string_view, 7> kLabels = {"IX", "IY", "IZ", "ZI", "ZX", "ZY", "ZZ"};
    return kLabels;
}

double CrCoefficients::get(std::string_view label) const {
    if (label == "IX") return nu_ix;
    if (label == "IY") return nu_iy;
    if (label == "IZ") return nu_iz;
    if (label == "ZI") return nu_zi;
    if (label == "ZX") return nu_zx;
    if (label == "ZY") return nu_zy;
    if (label == "ZZ") return nu_zz;
    throw InvalidInput("not a CR coefficient label: " + std::string(label));
}

void CrCoefficients::set(std::string_view label, double value) {
    if (label == "IX") {
        nu_ix = value;
    } else if (label == "IY") {
        nu_iy = value;
    } else if (label == "IZ") {
        nu_iz = value;
    } else if (label == "ZI") {
        nu_zi = value;
    } else if (label == "ZX") {
        nu_zx = value;
    } else if (label == "ZY") {
        nu_zy = value;
    } else if (label == "ZZ") {
        nu_zz = value;
    } else {
        throw InvalidInput("not a CR coefficient label: " + std::string(label));
    }
}

CombinedTone combine_tones(const DriveConfig &cfg) {
    std::complex<double> z =
        std::polar(cfg.omega_xtalk, -cfg.phi_t) + std::polar(cfg.omega_rotary, cfg.phi_r);
    double lead = cfg.omega_rotary != 0 ? cfg.omega_rotary : cfg.omega_xtalk;
    if (lead == 0) {
        return {};
    }
    double s = lead > 0 ? 1.0 : -1.0;
    if (std::abs(z) == 0) {
        return {0.0, 0.0};
    }
    return {s * std::abs(z), std::arg(s * z)};
}

std::pair<double, double> target_tone_terms(const CombinedTone &tone) {
    return {tone.omega * std::cos(tone.phi), tone.omega * std::sin(tone.phi)};
}

CMatrix build_hamiltonian(const CrCoefficients &c) {
    CMatrix h = CMatrix::Zero(4, 4);
    for (std::string_view label : CrCoefficients::labels()) {
        double v = c.get(label);
        if (v != 0) {
            h += (v / 2) * pauli_matrix(label);
        }
    }
    return h;
}

CrCoefficients negate_drive(const CrCoefficients &c) {
    CrCoefficients r = c;
    r.nu_ix = -c.nu_ix;
    r.nu_iy = -c.nu_iy;
    r.nu_zx = -c.nu_zx;
    r.nu_zy = -c.nu_zy;
    return r;
}

bool is_drive_odd(const PauliLabel &label) {
    if (label.num_qubits() < 2) {
        throw InvalidInput("drive parity needs a control and a target letter");
    }
    return label[1] == 'X' || label[1] == 'Y';
}

CoefficientModel CoefficientModel::direct(std::vector<std::pair<double, CrCoefficients>> points) {
    if (points.empty()) {
        throw InvalidInput("direct coefficient model needs at least one point");
    }
    std::sort(points.begin(), points.end(), [](const auto &a, const auto &b) {
        return a.first < b.first;
    });
    CoefficientModel m;
    m.mode_ = Mode::kDirect;
    m.points_ = std::move(points);
    return m;
}

CoefficientModel CoefficientModel::phenomenological(
    std::map<std::string, QuadraticTerm> terms, std::optional<CrosstalkTone> crosstalk) {
    for (const auto &[label, term] : terms) {
        if (!is_cr_label(label)) {
            throw InvalidInput("unsupported coefficient label '" + label + "'");
        }
        if (term.odd != is_drive_odd(PauliLabel(label))) {
            throw InvalidInput("parity flag of '" + label + "' contradicts the drive-sign rule");
        }
    }
    CoefficientModel m;
    m.mode_ = Mode::kPhenomenological;
    m.terms_ = std::move(terms);
    m.crosstalk_ = crosstalk;
    return m;
}

CrCoefficients CoefficientModel::at(double x) const {
    if (mode_ == Mode::kDirect) {
        for (const auto &[px, c] : points_) {
            if (std::abs(px - x) <= 1e-12 * std::max(1.0, std::abs(x))) {
                return c;
            }
        }
        throw InvalidInput("direct coefficient model has no point at x = " + std::to_string(x));
    }
    CrCoefficients c;
    for (const auto &[label, term] : terms_) {
        c.set(label, term(x));
    }
    if (crosstalk_) {
        DriveConfig cfg;
        cfg.omega_xtalk = crosstalk_->omega_t;
        cfg.phi_t = crosstalk_->phi_t;
        cfg.omega_rotary = crosstalk_->rotary_per_x * x;
        auto [ix, iy] = target_tone_terms(combine_tones(cfg));
        c.nu_ix += ix;
        c.nu_iy += iy;
    }
    return c;
}

CoefficientModel CoefficientModel::with_zx_scale(double scale) const {
    CoefficientModel m = *this;
    if (mode_ == Mode::kDirect) {
        for (auto &[_, c] : m.points_) {
            c.nu_zx *= scale;
        }
    } else {
        auto &t = m.terms_["ZX"];
        t.odd = true;
        t.c0 *= scale;
        t.c1 *= scale;
        t.c2 *= scale;
    }
    return m;
}

CoefficientModel CoefficientModel::from_json(const nlohmann::json &j) {
    check_keys(j, {"mode", "t_pulse_ns", "terms", "crosstalk", "points"}, "coefficient model");
    if (!j.contains("mode") || !j.at("mode").is_string()) {
        throw ConfigError("coefficient model: 'mode' must be \"direct\" or \"phenomenological\"");
    }
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "direct") {
        if (j.contains("terms") || j.contains("crosstalk")) {
            throw ConfigError("coefficient model: direct mode takes only 'points'");
        }
        if (!j.contains("points") || !j.at("points").is_array()) {
            throw ConfigError("coefficient model: direct mode needs a 'points' array");
        }
        std::vector<std::pair<double, CrCoefficients>> points;
        for (const auto &p : j.at("points")) {
            check_keys(p, {"x", "nu_khz"}, "coefficient model point");
            double x = number_at(p, "x", "coefficient model point");
            CrCoefficients c;
            if (p.contains("nu_khz")) {
                for (const auto &[label, v] : p.at("nu_khz").items()) {
                    if (!is_cr_label(label) || !v.is_number()) {
                        throw ConfigError("coefficient model point: bad coefficient '" + label + "'");
                    }
                    c.set(label, khz_to_rad_s(v.get<double>()));
                }
            }
            points.emplace_back(x, c);
        }
        return direct(std::move(points));
    }
    if (mode != "phenomenological") {
        throw ConfigError("coefficient model: unknown mode '" + mode + "'");
    }
    if (j.contains("points")) {
        throw ConfigError("coefficient model: 'points' is only valid in direct mode");
    }
    double t_pulse = j.contains("t_pulse_ns") ? ns_to_s(number_at(j, "t_pulse_ns", "coefficient model"))
                                              : kDefaultPulseTime;
    if (!(t_pulse > 0)) {
        throw ConfigError("coefficient model: t_pulse_ns must be positive");
    }
    std::map<std::string, QuadraticTerm> terms;
    if (j.contains("terms")) {
        check_keys(j.at("terms"), {"IX", "IY", "IZ", "ZI", "ZX", "ZY", "ZZ"}, "coefficient model terms");
        for (const auto &[label, tj] : j.at("terms").items()) {
            std::string where = "coefficient model term " + label;
            check_keys(tj, {"theta0", "theta1", "theta2", "nu0_khz", "nu1_khz", "nu2_khz", "odd"}, where);
            bool has_theta = tj.contains("theta0") || tj.contains("theta1") || tj.contains("theta2");
            bool has_nu = tj.contains("nu0_khz") || tj.contains("nu1_khz") || tj.contains("nu2_khz");
            if (has_theta && has_nu) {
                throw ConfigError(where + ": mixes angle and frequency coefficients");
            }
            QuadraticTerm t;
            if (has_theta) {
                double k = -2.0 / t_pulse;
                t.c0 = k * optional_number(tj, "theta0", where);
                t.c1 = k * optional_number(tj, "theta1", where);
                t.c2 = k * optional_number(tj, "theta2", where);
            } else {
                t.c0 = khz_to_rad_s(optional_number(tj, "nu0_khz", where));
                t.c1 = khz_to_rad_s(optional_number(tj, "nu1_khz", where));
                t.c2 = khz_to_rad_s(optional_number(tj, "nu2_khz", where));
            }
            bool rule = is_drive_odd(PauliLabel(label));
            if (tj.contains("odd")) {
                if (!tj.at("odd").is_boolean()) {
                    throw ConfigError(where + ": 'odd' must be a boolean");
                }
                if (tj.at("odd").get<bool>() != rule) {
                    throw ConfigError(where + ": 'odd' contradicts the drive-sign rule");
                }
            }
            t.odd = rule;
            terms[label] = t;
        }
    }
    std::optional<CrosstalkTone> xt;
    if (j.contains("crosstalk")) {
        const auto &cj = j.at("crosstalk");
        check_keys(cj, {"omega_t_khz", "phi_t_rad", "rotary_khz_per_x"}, "coefficient model crosstalk");
        CrosstalkTone c;
        c.omega_t = khz_to_rad_s(optional_number(cj, "omega_t_khz", "crosstalk"));
        c.phi_t = optional_number(cj, "phi_t_rad", "crosstalk");
        c.rotary_per_x = khz_to_rad_s(optional_number(cj, "rotary_khz_per_x", "crosstalk"));
        xt = c;
    }
    return phenomenological(std::move(terms), xt);
}

nlohmann::json CoefficientModel::to_json() const {
    nlohmann::json j;
    if (mode_ == Mode::kDirect) {
        j["mode"] = "direct";
        j["points"] = nlohmann::json::array();
        for (const auto &[x, c] : points_) {
            nlohmann::json nu;
            for (std::string_view label : CrCoefficients::labels()) {
                nu[std::string(label)] = rad_s_to_khz(c.get(label));
            }
            j["points"].push_back({{"x", x}, {"nu_khz", nu}});
        }
        return j;
    }
    j["mode"] = "phenomenological";
    j["terms"] = nlohmann::json::object();
    for (const auto &[label, t] : terms_) {
        j["terms"][label] = {{"nu0_khz", rad_s_to_khz(t.c0)},
                             {"nu1_khz", rad_s_to_khz(t.c1)},
                             {"nu2_khz", rad_s_to_khz(t.c2)},
                             {"odd", t.odd}};
    }
    if (crosstalk_) {
        j["crosstalk"] = {{"omega_t_khz", rad_s_to_khz(crosstalk_->omega_t)},
                          {"phi_t_rad", crosstalk_->phi_t},
                          {"rotary_khz_per_x", rad_s_to_khz(crosstalk_->rotary_per_x)}};
    }
    return j;
}

std::string_view asymptote_name(Asymptote a) {
    switch (a) {
        case Asymptote::kGrows:
            return "grows";
        case Asymptote::kConstant:
            return "constant";
        case Asymptote::kZero:
            return "zero";
        case Asymptote::kVaries:
            return "varies";
    }
    return "varies";
}

namespace {

// One side of the grid (x >= 0 or x <= 0), ordered by |x|.
Asymptote classify_side(const std::vector<std::pair<double, double>> &side, double zero_tol) {
    double peak = 0;
    for (const auto &[_, v] : side) {
        peak = std::max(peak, std::abs(v));
    }
    if (peak <= zero_tol) {
        return Asymptote::kZero;
    }
    std::size_t half = side.size() / 2;
    double lo = INFINITY, hi = -INFINITY, outer_peak = 0;
    for (std::size_t k = half; k < side.size(); k++) {
        lo = std::min(lo, side[k].second);
        hi = std::max(hi, side[k].second);
        outer_peak = std::max(outer_peak, std::abs(side[k].second));
    }
    if (hi - lo <= 0.01 * outer_peak) {
        return Asymptote::kConstant;
    }
    double near = std::abs(side.front().second);
    double far = std::abs(side.back().second);
    bool monotone = true;
    for (std::size_t k = half + 1; k < side.size(); k++) {
        if (std::abs(side[k].second) < std::abs(side[k - 1].second)) {
            monotone = false;
        }
    }
    if (monotone && far > 2 * near + zero_tol) {
        return Asymptote::kGrows;
    }
    return Asymptote::kVaries;
}

}  // namespace

LargeRotaryReport large_rotary_checks(const CoefficientModel &model, const std::vector<double> &x_grid) {
    if (model.mode() != CoefficientModel::Mode::kPhenomenological) {
        throw UnsupportedMode("large_rotary_checks needs a phenomenological coefficient model");
    }
    if (x_grid.size() < 3) {
        throw InvalidInput("large_rotary_checks needs at least three grid points");
    }
    std::vector<double> xs = x_grid;
    std::sort(xs.begin(), xs.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
    });
    std::vector<CrCoefficients> cs;
    double scale = 0;
    for (double x : xs) {
        cs.push_back(model.at(x));
        for (std::string_view label : CrCoefficients::labels()) {
            scale = std::max(scale, std::abs(cs.back().get(label)));
        }
    }
    double zero_tol = std::max(1e-9 * scale, 1e-12);

    LargeRotaryReport report;
    report.expected = {{"IX", Asymptote::kGrows},    {"IY", Asymptote::kConstant}, {"IZ", Asymptote::kGrows},
                       {"ZI", Asymptote::kConstant}, {"ZX", Asymptote::kConstant}, {"ZY", Asymptote::kZero},
                       {"ZZ", Asymptote::kGrows}};
    for (std::string_view lv : CrCoefficients::labels()) {
        std::string label(lv);
        std::vector<std::pair<double, double>> pos, neg;
        for (std::size_t k = 0; k < xs.size(); k++) {
            double v = cs[k].get(label);
            if (xs[k] >= 0) {
                pos.emplace_back(xs[k], v);
            }
            if (xs[k] <= 0) {
                neg.emplace_back(xs[k], v);
            }
        }
        std::vector<Asymptote> sides;
        if (pos.size() >= 2) {
            sides.push_back(classify_side(pos, zero_tol));
        }
        if (neg.size() >= 2) {
            sides.push_back(classify_side(neg, zero_tol));
        }
        Asymptote a = sides.empty() ? Asymptote::kVaries : sides.front();
        for (Asymptote s : sides) {
            if (s != a) {
                a = Asymptote::kVaries;
            }
        }
        report.behavior[label] = a;
        Asymptote want = report.expected.at(label);
        // A coefficient that is identically zero is also constant.
        bool ok = a == want || (want == Asymptote::kConstant && a == Asymptote::kZero);
        if (!ok) {
            report.violations.push_back(label + ": expected " + std::string(asymptote_name(want)) + ", observed " +
                                        std::string(asymptote_name(a)));
        }
    }
    const CrCoefficients &far = cs.back();
    report.ix_dominates = true;
    for (std::string_view label : CrCoefficients::labels()) {
        if (label != "IX" && std::abs(far.get(label)) >= std::abs(far.nu_ix)) {
            report.ix_dominates = false;
        }
    }
    return report;
}

}  // namespace rotecho
