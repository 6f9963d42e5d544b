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


#include "rotecho/fit.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "rotecho/errors.h"

namespace rotecho {

namespace {

bool valid_label(const std::string &label) {
    return label.size() == 3 && label.find_first_not_of("IXYZ") == std::string::npos;
}

void check_label(const std::string &label, std::size_t qubit_count) {
    if (!valid_label(label)) {
        throw InvalidInput("theta label must be three letters from IXYZ: '" + label + "'");
    }
    if (qubit_count == 2 && label[2] != 'I') {
        throw InvalidInput("two-qubit theta model cannot act on the spectator: '" + label + "'");
    }
}

double json_number(const nlohmann::json &j, const std::string &key, const std::string &where) {
    if (!j.at(key).is_number()) {
        throw ConfigError(where + ": '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

void only_keys(const nlohmann::json &j, const std::set<std::string> &allowed, const std::string &where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto &[k, v] : j.items()) {
        if (!allowed.count(k)) {
            throw ConfigError(where + ": unknown key '" + k + "'");
        }
    }
}

const ThetaTerm kZeroTerm{};

}  // namespace

bool default_odd_parity(std::string_view label) {
    return label.size() >= 2 && (label[1] == 'X' || label[1] == 'Y');
}

ThetaModel::ThetaModel(std::size_t qubit_count, double t_pulse) : qubit_count_(qubit_count), t_pulse_(t_pulse) {
    if (qubit_count != 2 && qubit_count != 3) {
        throw InvalidInput("theta model needs 2 or 3 qubits");
    }
    if (!(t_pulse > 0)) {
        throw InvalidInput("theta model pulse time must be positive");
    }
}

ThetaModel ThetaModel::reference_2q() {
    ThetaModel m(2, kDefaultPulseTime);
    m.set("IXI", -4.63e-1, 1.00, 0);
    // The linear IYI coefficient is printed without digits; it is held at zero.
    m.set("IYI", 7.98e-3, 0, 0);
    m.set("IZI", 2.55e-2, -1.23e-3, -2.69e-3);
    m.set("ZZI", -1.59e-2, 0, 2.11e-3);
    m.set("ZYI", 7.05e-3, 0, 0);
    m.set("ZXI", std::numbers::pi / 8, 0, 0);
    return m;
}

ThetaModel ThetaModel::reference_3q() {
    ThetaModel m(3, kDefaultPulseTime);
    m.set("IXI", -2.97e-1, 1.00, 0);
    m.set("IYI", 0, 0, 0);
    m.set("IZI", 4.88e-2, -1.23e-2, -5.84e-3);
    m.set("ZZI", -1.59e-2, 0, 2.11e-3);
    m.set("IZZ", -2.66e-2, 0, -3.02e-3);
    m.set("IZY", 0, 0, 0);
    m.set("ZYI", 0, 0, 0);
    m.set("ZXI", 0, 0, 0);
    m.set("IYZ", 0, 0, 0);
    m.set("IXZ", 7.21e-2, -1.85e-2, 0);
    return m;
}

void ThetaModel::set(const std::string &label, double theta0, double theta1, double theta2) {
    set(label, ThetaTerm{theta0, theta1, theta2, default_odd_parity(label)});
}

void ThetaModel::set(const std::string &label, const ThetaTerm &term) {
    check_label(label, qubit_count_);
    if (!std::isfinite(term.theta0) || !std::isfinite(term.theta1) || !std::isfinite(term.theta2)) {
        throw InvalidInput("theta coefficients must be finite");
    }
    terms_[label] = term;
}

const ThetaTerm &ThetaModel::term(const std::string &label) const {
    auto it = terms_.find(label);
    return it == terms_.end() ? kZeroTerm : it->second;
}

double ThetaModel::angle(const std::string &label, double x) const {
    return term(label).at(x);
}

ThetaModel ThetaModel::parity_negated() const {
    ThetaModel out = *this;
    for (auto &[label, t] : out.terms_) {
        if (t.odd) {
            t.theta0 = -t.theta0;
            t.theta1 = -t.theta1;
            t.theta2 = -t.theta2;
        }
    }
    return out;
}

ThetaModel ThetaModel::from_json(const nlohmann::json &j) {
    only_keys(j, {"mode", "t_pulse_ns", "qubit_count", "terms"}, "theta model");
    if (!j.contains("mode") || j.at("mode") != "theta") {
        throw ConfigError("theta model: 'mode' must be \"theta\"");
    }
    double t = j.contains("t_pulse_ns") ? ns_to_s(json_number(j, "t_pulse_ns", "theta model")) : kDefaultPulseTime;
    std::size_t qc = 2;
    if (j.contains("qubit_count")) {
        if (!j.at("qubit_count").is_number_integer()) {
            throw ConfigError("theta model: 'qubit_count' must be an integer");
        }
        qc = j.at("qubit_count").get<std::size_t>();
    }
    ThetaModel m = [&] {
        try {
            return ThetaModel(qc, t);
        } catch (const InvalidInput &e) {
            throw ConfigError(std::string("theta model: ") + e.what());
        }
    }();
    if (j.contains("terms")) {
        if (!j.at("terms").is_object()) {
            throw ConfigError("theta model: 'terms' must be an object");
        }
        for (const auto &[label, v] : j.at("terms").items()) {
            const std::string where = "theta term " + label;
            only_keys(v, {"theta0", "theta1", "theta2", "odd"}, where);
            ThetaTerm term;
            term.theta0 = v.contains("theta0") ? json_number(v, "theta0", where) : 0.0;
            term.theta1 = v.contains("theta1") ? json_number(v, "theta1", where) : 0.0;
            term.theta2 = v.contains("theta2") ? json_number(v, "theta2", where) : 0.0;
            term.odd = default_odd_parity(label);
            if (v.contains("odd")) {
                if (!v.at("odd").is_boolean()) {
                    throw ConfigError(where + ": 'odd' must be a boolean");
                }
                term.odd = v.at("odd").get<bool>();
            }
            try {
                m.set(label, term);
            } catch (const InvalidInput &e) {
                throw ConfigError(e.what());
            }
        }
    }
    return m;
}

nlohmann::json ThetaModel::to_json() const {
    nlohmann::json j;
    j["mode"] = "theta";
    j["t_pulse_ns"] = t_pulse_ * 1e9;
    j["qubit_count"] = qubit_count_;
    j["terms"] = nlohmann::json::object();
    for (const auto &[label, t] : terms_) {
        j["terms"][label] = {{"theta0", t.theta0}, {"theta1", t.theta1}, {"theta2", t.theta2}, {"odd", t.odd}};
    }
    return j;
}

CMatrix theta_unitary(const ThetaModel &model, double x, int sign) {
    if (sign != 1 && sign != -1) {
        throw InvalidInput("theta_unitary sign must be +1 or -1");
    }
    const std::size_t nq = model.qubit_count();
    const Eigen::Index dim = Eigen::Index{1} << nq;
    CMatrix h = CMatrix::Zero(dim, dim);
    for (const auto &[label, t] : model.terms()) {
        const double th = (t.odd && sign < 0 ? -1.0 : 1.0) * t.at(x);
        if (th != 0) {
            h += th * pauli_matrix(label.substr(0, nq));
        }
    }
    // exp(+i h)
    return mat_exp(-h, 1.0);
}

CMatrix theta_echo(const ThetaModel &model, double x) {
    const std::size_t nq = model.qubit_count();
    CMatrix xc = pauli_matrix(std::string("X") + std::string(nq - 1, 'I'));
    return xc * theta_unitary(model, x, -1) * xc * theta_unitary(model, x, 1);
}

// ------------------------------------------------------------------ datasets

void SweepDataset::validate() const {
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto &r = rows[k];
        if (!std::isfinite(r.x) || !std::isfinite(r.value)) {
            throw InvalidInput("sweep row " + std::to_string(k) + " is not finite");
        }
        if (!(r.weight > 0) || !std::isfinite(r.weight)) {
            throw InvalidInput("sweep row " + std::to_string(k) + " needs a positive weight");
        }
        if (!valid_label(r.observable)) {
            throw InvalidInput("sweep row " + std::to_string(k) + " has bad observable '" + r.observable + "'");
        }
        if (k > 0 && r.x < rows[k - 1].x) {
            throw InvalidInput("sweep rows must be sorted by x");
        }
    }
}

std::vector<double> SweepDataset::x_values() const {
    std::vector<double> xs;
    for (const auto &r : rows) {
        if (xs.empty() || xs.back() != r.x) {
            xs.push_back(r.x);
        }
    }
    return xs;
}

std::string SweepDataset::to_csv() const {
    std::string out = "x,observable,nu_khz,weight\n";
    char buf[160];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g\n", r.x, r.observable.c_str(), rad_s_to_khz(r.value),
                      r.weight);
        out += buf;
    }
    return out;
}

SweepDataset SweepDataset::from_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    SweepDataset ds;
    bool header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header) {
            if (line != "x,observable,nu_khz,weight") {
                throw ConfigError("sweep CSV header mismatch at line " + std::to_string(line_no));
            }
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 4) {
            throw ConfigError("sweep CSV line " + std::to_string(line_no) + " needs 4 fields");
        }
        try {
            std::size_t used = 0;
            SweepPoint r;
            r.x = std::stod(f[0], &used);
            r.observable = f[1];
            r.value = khz_to_rad_s(std::stod(f[2]));
            r.weight = std::stod(f[3]);
            ds.rows.push_back(r);
        } catch (const std::logic_error &) {
            throw ConfigError("sweep CSV line " + std::to_string(line_no) + " has a bad number");
        }
    }
    if (!header) {
        throw ConfigError("sweep CSV has no header");
    }
    try {
        ds.validate();
    } catch (const InvalidInput &e) {
        throw ConfigError(e.what());
    }
    return ds;
}

std::vector<std::string> default_observables(std::size_t qubit_count) {
    if (qubit_count == 2) {
        return {"IYI", "IZI", "ZYI", "ZZI"};
    }
    if (qubit_count == 3) {
        return {"IYI", "IZI", "IYZ", "IZZ"};
    }
    throw InvalidInput("default_observables: 2 or 3 qubits");
}

namespace {

std::map<std::string, double> observables_from_record(const HeatRecord &rec, std::size_t qubit_count, int n,
                                                      double t, int zx_sign) {
    std::map<std::string, double> out;
    if (qubit_count == 2) {
        for (const auto &[label, nu] : heat_record_nu_tilde(rec, n, t, zx_sign)) {
            out[label + "I"] = nu;
        }
        return out;
    }
    SpectatorHeatResult res = reconstruct_spectator(rec, n);
    const cdouble i(0, 1);
    out["IYI"] = (i * res.a_y).real() / t;
    out["IZI"] = (i * res.a_z).real() / t;
    out["IYZ"] = (i * res.a_yz).real() / t;
    out["IZZ"] = (i * res.a_zz).real() / t;
    return out;
}

}  // namespace

std::map<std::string, double> heat_observables(const ThetaModel &model, double x, const SweepConfig &cfg) {
    if (std::find(cfg.heat.reps.begin(), cfg.heat.reps.end(), cfg.n) == cfg.heat.reps.end()) {
        throw InvalidInput("sweep repetition count must be one of the HEAT reps");
    }
    CMatrix u = theta_echo(model, x);
    if (model.qubit_count() == 2) {
        // exp(+i theta ZX) with theta > 0 is a negative rotation.
        const int zx_sign = model.angle("ZXI", x) < 0 ? 1 : -1;
        std::map<std::string, double> out;
        for (const auto &[label, nu] : heat_echo_nu_tilde(u, cfg.heat, cfg.n, model.t_pulse(), zx_sign)) {
            out[label + "I"] = nu;
        }
        return out;
    }
    if (std::abs(model.angle("ZXI", x)) > 1e-12) {
        throw OutOfScope("three-qubit sweeps reconstruct the target-spectator block and need ZXI = 0");
    }
    return observables_from_record(run_heat_spectator(u, cfg.heat), 3, cfg.n, model.t_pulse(), 1);
}

SweepDataset synthesize_sweep(const ThetaModel &model, const std::vector<double> &x_grid, const SweepConfig &cfg) {
    if (!std::is_sorted(x_grid.begin(), x_grid.end())) {
        throw InvalidInput("x grid must be sorted");
    }
    const auto labels = cfg.observables.empty() ? default_observables(model.qubit_count()) : cfg.observables;
    SweepDataset ds;
    for (double x : x_grid) {
        auto obs = heat_observables(model, x, cfg);
        for (const auto &label : labels) {
            auto it = obs.find(label);
            if (it == obs.end()) {
                throw InvalidInput("observable '" + label + "' is not reconstructed for this model");
            }
            ds.rows.push_back({x, label, it->second, 1.0});
        }
    }
    return ds;
}

SweepDataset sweep_from_heat_records(const std::vector<std::pair<double, HeatRecord>> &records,
                                     std::size_t qubit_count, int n, double t_pulse,
                                     const std::vector<std::string> &observables, int zx_sign) {
    const auto labels = observables.empty() ? default_observables(qubit_count) : observables;
    SweepDataset ds;
    for (const auto &[x, rec] : records) {
        auto obs = observables_from_record(rec, qubit_count, n, t_pulse, zx_sign);
        for (const auto &label : labels) {
            auto it = obs.find(label);
            if (it == obs.end()) {
                throw InvalidInput("observable '" + label + "' is not reconstructed from these records");
            }
            ds.rows.push_back({x, label, it->second, 1.0});
        }
    }
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------- fitting

std::vector<ThetaParam> reference_mask_2q() {
    return {{"IXI", 0}, {"IYI", 0}, {"IZI", 0}, {"IZI", 1}, {"IZI", 2}, {"ZZI", 2}, {"ZYI", 0}};
}

std::vector<ThetaParam> reference_mask_3q() {
    return {{"IXI", 0}, {"IZI", 0}, {"IZI", 2}, {"IZZ", 2}, {"IXZ", 0}, {"IXZ", 1}};
}

double get_param(const ThetaModel &m, const ThetaParam &p) {
    const ThetaTerm &t = m.term(p.label);
    switch (p.order) {
        case 0:
            return t.theta0;
        case 1:
            return t.theta1;
        case 2:
            return t.theta2;
    }
    throw InvalidInput("theta order must be 0, 1 or 2");
}

void set_param(ThetaModel &m, const ThetaParam &p, double value) {
    ThetaTerm t = m.term(p.label);
    if (m.terms().find(p.label) == m.terms().end()) {
        t.odd = default_odd_parity(p.label);
    }
    switch (p.order) {
        case 0:
            t.theta0 = value;
            break;
        case 1:
            t.theta1 = value;
            break;
        case 2:
            t.theta2 = value;
            break;
        default:
            throw InvalidInput("theta order must be 0, 1 or 2");
    }
    m.set(p.label, t);
}

SimplexResult minimize_simplex(const std::function<double(const std::vector<double> &)> &f,
                               const std::vector<double> &x0, const std::vector<double> &steps,
                               const SimplexOptions &opts) {
    const std::size_t n = x0.size();
    if (n == 0 || steps.size() != n) {
        throw InvalidInput("minimize_simplex: need matching non-empty start and steps");
    }
    SimplexResult res;
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t k = 0; k < n; ++k) {
        pts[k + 1][k] += steps[k];
    }
    auto eval = [&](const std::vector<double> &x) {
        res.evaluations++;
        double v = f(x);
        return std::isfinite(v) ? v : INFINITY;
    };
    for (std::size_t k = 0; k <= n; ++k) {
        fv[k] = eval(pts[k]);
    }
    std::vector<std::size_t> order(n + 1);
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        double spread = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            for (std::size_t c = 0; c < n; ++c) {
                const double tol = opts.xtol_rel * std::abs(pts[best][c]) + opts.xtol_abs;
                spread = std::max(spread, std::abs(pts[k][c] - pts[best][c]) / tol);
            }
        }
        if (fv[worst] - fv[best] <= opts.ftol_rel * std::abs(fv[best]) + opts.ftol_abs && spread <= 1) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= opts.max_evaluations) {
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) {
                continue;
            }
            for (std::size_t c = 0; c < n; ++c) {
                centroid[c] += pts[k][c] / static_cast<double>(n);
            }
        }
        auto along = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t c = 0; c < n; ++c) {
                p[c] = centroid[c] + coef * (pts[worst][c] - centroid[c]);
            }
            return p;
        };
        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            pts[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == best) {
                continue;
            }
            for (std::size_t c = 0; c < n; ++c) {
                pts[k][c] = pts[best][c] + 0.5 * (pts[k][c] - pts[best][c]);
            }
            fv[k] = eval(pts[k]);
        }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    res.x = pts[static_cast<std::size_t>(it - fv.begin())];
    res.f = *it;
    return res;
}

namespace {

SweepConfig eval_config(const SweepConfig &cfg) {
    SweepConfig c = cfg;
    c.heat.reps = {cfg.n};
    c.heat.shots.reset();
    return c;
}

Eigen::VectorXd residuals(const SweepDataset &data, const ThetaModel &model, const SweepConfig &cfg) {
    const SweepConfig c = eval_config(cfg);
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.rows.size()));
    std::map<std::string, double> obs;
    double current_x = NAN;
    for (std::size_t k = 0; k < data.rows.size(); ++k) {
        const auto &row = data.rows[k];
        if (!(row.x == current_x)) {
            obs = heat_observables(model, row.x, c);
            current_x = row.x;
        }
        auto it = obs.find(row.observable);
        if (it == obs.end()) {
            throw InvalidInput("observable '" + row.observable + "' is not reconstructed for this model");
        }
        r(static_cast<Eigen::Index>(k)) = std::sqrt(row.weight) * model.t_pulse() * (it->second - row.value);
    }
    return r;
}

void check_fit_inputs(const SweepDataset &data, const std::vector<ThetaParam> &free) {
    if (data.rows.empty()) {
        throw InvalidInput("fit_theta: no data");
    }
    if (free.empty()) {
        throw InvalidInput("fit_theta: no free parameters");
    }
    if (data.rows.size() < free.size()) {
        throw InvalidInput("fit_theta: fewer rows than free parameters");
    }
    for (std::size_t a = 0; a < free.size(); ++a) {
        if (free[a].order < 0 || free[a].order > 2) {
            throw InvalidInput("fit_theta: theta order must be 0, 1 or 2");
        }
        for (std::size_t b = a + 1; b < free.size(); ++b) {
            if (free[a] == free[b]) {
                throw InvalidInput("fit_theta: duplicate free parameter " + free[a].label);
            }
        }
    }
    data.validate();
}

}  // namespace

double sweep_objective(const SweepDataset &data, const ThetaModel &model, const SweepConfig &cfg) {
    return residuals(data, model, cfg).squaredNorm();
}

RMatrix sweep_jacobian(const SweepDataset &data, const std::vector<ThetaParam> &free, const ThetaModel &at,
                       const SweepConfig &cfg) {
    RMatrix j(static_cast<Eigen::Index>(data.rows.size()), static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) {
        const double v = get_param(at, free[k]);
        const double h = 1e-6 * std::max(1.0, std::abs(v));
        ThetaModel plus = at, minus = at;
        set_param(plus, free[k], v + h);
        set_param(minus, free[k], v - h);
        j.col(static_cast<Eigen::Index>(k)) = (residuals(data, plus, cfg) - residuals(data, minus, cfg)) / (2 * h);
    }
    return j;
}

ThetaFit fit_theta(const SweepDataset &data, const std::vector<ThetaParam> &free, const ThetaModel &init,
                   const FitOptions &opts) {
    check_fit_inputs(data, free);
    if (opts.restarts < 1) {
        throw InvalidInput("fit_theta: restarts must be at least 1");
    }
    const std::size_t np = free.size();
    auto model_at = [&](const std::vector<double> &p) {
        ThetaModel m = init;
        for (std::size_t k = 0; k < np; ++k) {
            set_param(m, free[k], p[k]);
        }
        return m;
    };
    auto objective = [&](const std::vector<double> &p) { return sweep_objective(data, model_at(p), opts.sweep); };
    std::vector<double> p0(np);
    for (std::size_t k = 0; k < np; ++k) {
        p0[k] = get_param(init, free[k]);
    }
    auto steps_for = [&](const std::vector<double> &p) {
        std::vector<double> s(np);
        for (std::size_t k = 0; k < np; ++k) {
            s[k] = 0.1 * std::abs(p[k]) + 1e-4;
        }
        return s;
    };

    SimplexResult best;
    best.f = INFINITY;
    int evaluations = 0;
    for (int start = 0; start < opts.restarts; ++start) {
        std::vector<double> p = p0;
        if (start > 0) {
            std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                              static_cast<std::uint32_t>(start)};
            std::mt19937_64 rng(seq);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            for (auto &v : p) {
                v = v * (1 + opts.start_spread * u(rng)) + 1e-3 * opts.start_spread * u(rng);
            }
        }
        SimplexResult r = minimize_simplex(objective, p, steps_for(p), opts.simplex);
        evaluations += r.evaluations;
        if (r.f < best.f) {
            best = r;
        }
    }
    // One more descent from the winner guards against a collapsed simplex.
    SimplexResult polish = minimize_simplex(objective, best.x, steps_for(best.x), opts.simplex);
    evaluations += polish.evaluations;
    if (polish.f <= best.f) {
        best = polish;
    }

    ThetaFit fit;
    fit.model = model_at(best.x);
    fit.free = free;
    fit.objective = best.f;
    fit.converged = best.converged;
    fit.evaluations = evaluations;
    double wsum = 0;
    for (const auto &r : data.rows) {
        wsum += r.weight;
    }
    fit.rms_khz = rad_s_to_khz(std::sqrt(best.f / wsum) / init.t_pulse());
    RMatrix j = sweep_jacobian(data, free, fit.model, opts.sweep);
    const double dof = std::max<double>(1.0, static_cast<double>(data.rows.size()) - static_cast<double>(np));
    RMatrix jtj = j.transpose() * j;
    fit.covariance = (best.f / dof) * Eigen::CompleteOrthogonalDecomposition<RMatrix>(jtj).pseudoInverse();
    return fit;
}

}  // namespace rotecho
