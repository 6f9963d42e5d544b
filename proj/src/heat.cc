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

#include "rotecho/heat.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "rotecho/errors.h"

namespace rotecho {

namespace {

constexpr cdouble kI(0, 1);

struct Layout {
    int num_qubits;
    int target;
    int cond;  // -1 when there is no conditioning qubit
};

std::string on_qubit(char p, int q, int n) {
    std::string s(n, 'I');
    s[q] = p;
    return s;
}

CMatrix rot(char p, double angle, int q, int n) {
    CMatrix m = pauli_matrix(on_qubit(p, q, n));
    CMatrix id = CMatrix::Identity(m.rows(), m.cols());
    return std::cos(angle / 2) * id - kI * std::sin(angle / 2) * m;
}

std::pair<double, double> simulate(const CMatrix &u, const Layout &l, HeatKind kind, int prep, int n) {
    const int dim = 1 << l.num_qubits;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    int index = 0;
    if (l.cond >= 0 && prep == 1) {
        index |= 1 << (l.num_qubits - 1 - l.cond);
    }
    psi(index) = 1;
    CMatrix half_y = rot('Y', std::numbers::pi / 2, l.target, l.num_qubits);
    if (kind == HeatKind::kY) {
        CMatrix step = rot('Y', std::numbers::pi, l.target, l.num_qubits) * u;
        for (int k = 0; k < n; k++) {
            psi = step * psi;
        }
        psi = half_y * psi;
    } else {
        psi = half_y * psi;
        CMatrix step = rot('Z', std::numbers::pi, l.target, l.num_qubits) * u;
        for (int k = 0; k < n; k++) {
            psi = step * psi;
        }
    }
    double z = psi.dot(pauli_matrix(on_qubit('Z', l.target, l.num_qubits)) * psi).real();
    double y = psi.dot(pauli_matrix(on_qubit('Y', l.target, l.num_qubits)) * psi).real();
    return {std::clamp(z, -1.0, 1.0), std::clamp(y, -1.0, 1.0)};
}

std::uint64_t cell_seed(std::uint64_t seed, HeatKind kind, int prep, int n) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(prep), static_cast<std::uint32_t>(n)};
    std::array<std::uint32_t, 2> out;
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double sample_expectation(double e, int shots, std::mt19937_64 &rng) {
    std::binomial_distribution<int> b(shots, std::clamp((1 + e) / 2, 0.0, 1.0));
    return 2.0 * b(rng) / shots - 1;
}

HeatRecord run(const CMatrix &u, const HeatConfig &cfg, const Layout &l, const std::vector<int> &preps) {
    cfg.validate();
    if (!is_unitary(u, 1e-9)) {
        throw InvalidInput("HEAT needs a unitary gate");
    }
    HeatRecord rec;
    for (HeatKind kind : cfg.kinds) {
        for (int prep : preps) {
            for (int n : cfg.reps) {
                HeatPoint p;
                p.kind = kind;
                p.prep = prep;
                p.n = n;
                auto [z, y] = simulate(u, l, kind, prep, n);
                p.y_err = z;
                p.z_err = y;
                if (cfg.shots) {
                    p.shots = cfg.shots;
                    p.seed = cell_seed(cfg.seed, kind, prep, n);
                    std::mt19937_64 rng(p.seed);
                    p.y_err = sample_expectation(z, *cfg.shots, rng);
                    p.z_err = sample_expectation(y, *cfg.shots, rng);
                } else {
                    p.seed = cfg.seed;
                }
                rec.points.push_back(p);
            }
        }
    }
    return rec;
}

void check_n(int n) {
    if (n <= 0 || n % 2 != 0) {
        throw InvalidInput("HEAT inversion needs a positive even N");
    }
}

const HeatPoint &need(const HeatRecord &rec, HeatKind kind, int prep, int n) {
    if (!rec.contains(kind, prep, n)) {
        throw IncompleteData("HEAT record lacks " + std::string(heat_kind_name(kind)) + "-type data for prep " +
                             std::to_string(prep) + " at N = " + std::to_string(n));
    }
    return rec.at(kind, prep, n);
}

}  // namespace

std::string_view heat_kind_name(HeatKind k) {
    return k == HeatKind::kY ? "Y" : "Z";
}

HeatKind parse_heat_kind(std::string_view s) {
    if (s == "Y") {
        return HeatKind::kY;
    }
    if (s == "Z") {
        return HeatKind::kZ;
    }
    throw InvalidInput("unknown HEAT sequence kind '" + std::string(s) + "'");
}

void HeatConfig::validate() const {
    if (reps.empty()) {
        throw InvalidInput("HEAT config needs at least one repetition count");
    }
    for (int n : reps) {
        if (n <= 0 || n % 2 != 0) {
            throw InvalidInput("HEAT repetition counts must be positive and even, got " + std::to_string(n));
        }
    }
    for (int p : preps) {
        if (p != 0 && p != 1) {
            throw InvalidInput("HEAT preparations must be 0 or 1");
        }
    }
    if (shots && *shots < 1) {
        throw InvalidInput("HEAT shots must be at least 1");
    }
}

bool HeatRecord::contains(HeatKind kind, int prep, int n) const {
    return std::any_of(points.begin(), points.end(), [&](const HeatPoint &p) {
        return p.kind == kind && p.prep == prep && p.n == n;
    });
}

const HeatPoint &HeatRecord::at(HeatKind kind, int prep, int n) const {
    for (const HeatPoint &p : points) {
        if (p.kind == kind && p.prep == prep && p.n == n) {
            return p;
        }
    }
    throw IncompleteData("no HEAT point for the requested cell");
}

std::string HeatRecord::to_csv() const {
    std::ostringstream out;
    out << "kind,prep,N,y_err,z_err,shots,seed\n";
    char buf[64];
    for (const HeatPoint &p : points) {
        out << heat_kind_name(p.kind) << ',' << p.prep << ',' << p.n << ',';
        std::snprintf(buf, sizeof buf, "%.17g", p.y_err);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", p.z_err);
        out << buf << ',';
        if (p.shots) {
            out << *p.shots;
        }
        out << ',' << p.seed << '\n';
    }
    return out.str();
}

HeatRecord HeatRecord::from_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    HeatRecord rec;
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
            if (line != "kind,prep,N,y_err,z_err,shots,seed") {
                throw ConfigError("HEAT CSV header mismatch at line " + std::to_string(line_no));
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
        if (line.back() == ',') {
            f.emplace_back();
        }
        if (f.size() != 7) {
            throw ConfigError("HEAT CSV line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                              " fields, expected 7");
        }
        try {
            HeatPoint p;
            p.kind = parse_heat_kind(f[0]);
            p.prep = std::stoi(f[1]);
            p.n = std::stoi(f[2]);
            p.y_err = std::stod(f[3]);
            p.z_err = std::stod(f[4]);
            if (!f[5].empty()) {
                p.shots = std::stoi(f[5]);
            }
            p.seed = std::stoull(f[6]);
            rec.points.push_back(p);
        } catch (const std::logic_error &e) {
            throw ConfigError("HEAT CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header) {
        throw ConfigError("HEAT CSV is missing its header");
    }
    return rec;
}

nlohmann::json HeatRecord::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const HeatPoint &p : points) {
        nlohmann::json j = {{"kind", heat_kind_name(p.kind)}, {"prep", p.prep}, {"N", p.n},
                            {"y_err", p.y_err},           {"z_err", p.z_err}, {"seed", p.seed}};
        j["shots"] = p.shots ? nlohmann::json(*p.shots) : nlohmann::json(nullptr);
        arr.push_back(j);
    }
    return {{"points", arr}};
}

HeatRecord HeatRecord::from_json(const nlohmann::json &j) {
    HeatRecord rec;
    try {
        for (const auto &e : j.at("points")) {
            HeatPoint p;
            p.kind = parse_heat_kind(e.at("kind").get<std::string>());
            p.prep = e.at("prep").get<int>();
            p.n = e.at("N").get<int>();
            p.y_err = e.at("y_err").get<double>();
            p.z_err = e.at("z_err").get<double>();
            p.seed = e.value("seed", std::uint64_t{0});
            if (e.contains("shots") && !e["shots"].is_null()) {
                p.shots = e["shots"].get<int>();
            }
            rec.points.push_back(p);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed HEAT record: ") + e.what());
    }
    return rec;
}

HeatRecord run_heat_2q(const CMatrix &u, const HeatConfig &cfg) {
    if (u.rows() != 4 || u.cols() != 4) {
        throw InvalidInput("run_heat_2q needs a 4x4 control-target unitary");
    }
    return run(u, cfg, Layout{2, 1, 0}, cfg.preps);
}

Heat2qResult reconstruct_2q(const HeatRecord &rec, int n, double t_half, const HeatInversion &opts) {
    check_n(n);
    if (!(t_half > 0)) {
        throw InvalidInput("reconstruct_2q needs a positive half-pulse duration");
    }
    std::array<double, 2> thetas = {opts.theta0, opts.theta1};
    if (opts.assume_zx_half_pi) {
        thetas = {std::numbers::pi / 2, std::numbers::pi / 2};
    }
    Heat2qResult out;
    std::array<AxisAngle *, 2> blocks = {&out.block0, &out.block1};
    std::array<std::array<cdouble, 4>, 2> a{};  // I, X, Y, Z per block
    for (int j = 0; j < 2; j++) {
        double th = thetas[j];
        if (!(th > 0) || th > std::numbers::pi) {
            throw InvalidInput("block rotation angle must lie in (0, pi]");
        }
        double s = std::sin(th);
        if (std::abs(s) < 1e-12) {
            throw DegenerateNorm("sin(theta) vanishes; HEAT cannot resolve the axis");
        }
        double ry = need(rec, HeatKind::kY, j, n).y_err / (n * s);
        double rz = need(rec, HeatKind::kZ, j, n).z_err / (n * s);
        double nx = 1 / std::sqrt(1 + ry * ry + rz * rz);
        AxisAngle &b = *blocks[j];
        b.prep = j;
        b.theta = th;
        b.axis = {j == 0 ? nx : -nx, -ry * nx, rz * nx};
        double sh = std::sin(th / 2);
        a[j] = {std::cos(th / 2), -kI * b.axis[0] * sh, -kI * b.axis[1] * sh, -kI * b.axis[2] * sh};
    }
    EchoReport &r = out.report;
    r.t_half = t_half;
    r.analytic = false;
    const char *const letters = "IXYZ";
    for (int k = 0; k < 4; k++) {
        std::string il = std::string("I") + letters[k];
        std::string zl = std::string("Z") + letters[k];
        r.a_coeffs.set(il, (a[0][k] + a[1][k]) / 2.0);
        if (k > 0) {
            r.a_coeffs.set(zl, (a[0][k] - a[1][k]) / 2.0);
            // Block generators theta_j n_j / (4 t).
            double c0 = thetas[0] * blocks[0]->axis[k - 1] / (4 * t_half);
            double c1 = thetas[1] * blocks[1]->axis[k - 1] / (4 * t_half);
            r.nu_tilde[il] = c0 + c1;
            r.nu_tilde[zl] = c0 - c1;
        }
    }
    r.nu_tilde["II"] = 0;
    r.nu_tilde["ZI"] = 0;
    for (const auto &[label, nu] : r.nu_tilde) {
        r.b_coeffs.set(label, cdouble(0, -2 * t_half * nu));
    }
    return out;
}

std::map<std::string, double> heat_record_nu_tilde(const HeatRecord &rec, int n, double t_half, int zx_sign) {
    std::map<std::string, double> out;
    for (const auto &[label, nu] : reconstruct_2q(rec, n, t_half).report.nu_tilde) {
        const bool flips = zx_sign < 0 && (label[1] == 'X' || label[1] == 'Y');
        out[label] = flips ? -nu : nu;
    }
    return out;
}

std::map<std::string, double> heat_echo_nu_tilde(const CMatrix &u, const HeatConfig &cfg, int n, double t_half,
                                                 int zx_sign) {
    if (zx_sign >= 0) {
        return heat_record_nu_tilde(run_heat_2q(u, cfg), n, t_half, 1);
    }
    const CMatrix z = pauli_matrix("IZ");
    return heat_record_nu_tilde(run_heat_2q(z * u * z, cfg), n, t_half, -1);
}

HeatRecord run_heat_spectator(const CMatrix &u, const HeatConfig &cfg) {
    CMatrix ts;
    if (u.rows() == 4 && u.cols() == 4) {
        ts = u;
    } else if (u.rows() == 8 && u.cols() == 8) {
        // Control in |0>: the upper-left block in C-T-S ordering.
        ts = u.topLeftCorner(4, 4);
        if (!is_unitary(ts, 1e-9)) {
            throw InvalidInput("gate mixes the control out of |0>; no target-spectator block to extract");
        }
    } else {
        throw InvalidInput("run_heat_spectator needs a 4x4 or 8x8 unitary");
    }
    return run(ts, cfg, Layout{2, 0, 1}, cfg.preps);
}

SpectatorHeatResult reconstruct_spectator(const HeatRecord &rec, int n) {
    check_n(n);
    std::array<cdouble, 2> ay, az;
    for (int j = 0; j < 2; j++) {
        ay[j] = kI * need(rec, HeatKind::kY, j, n).y_err / (2.0 * n);
        az[j] = -kI * need(rec, HeatKind::kZ, j, n).z_err / (2.0 * n);
    }
    SpectatorHeatResult out;
    out.a_y = (ay[0] + ay[1]) / 2.0;
    out.a_yz = (ay[0] - ay[1]) / 2.0;
    out.a_z = (az[0] + az[1]) / 2.0;
    out.a_zz = (az[0] - az[1]) / 2.0;
    cdouble ii = 0;
    for (int j = 0; j < 2; j++) {
        ii += std::cos(kI * std::sqrt(ay[j] * ay[j] + az[j] * az[j]));
        double half_theta = std::hypot(std::abs(ay[j]), std::abs(az[j]));
        if (2 * half_theta * n >= 0.5) {
            out.linearity_warning = true;
        }
    }
    out.a_ii = ii / 2.0;
    return out;
}

HeatRecord run_heat_1q(const CMatrix &u, const HeatConfig &cfg) {
    if (u.rows() != 2 || u.cols() != 2) {
        throw InvalidInput("run_heat_1q needs a 2x2 unitary");
    }
    return run(u, cfg, Layout{1, 0, -1}, {0});
}

OneQubitHeatResult reconstruct_1q(const HeatRecord &rec, int n) {
    check_n(n);
    OneQubitHeatResult out;
    out.a_y = kI * need(rec, HeatKind::kY, 0, n).y_err / (2.0 * n);
    out.a_z = -kI * need(rec, HeatKind::kZ, 0, n).z_err / (2.0 * n);
    out.a_i = std::cos(kI * std::sqrt(out.a_y * out.a_y + out.a_z * out.a_z));
    out.linearity_warning = 2 * std::hypot(std::abs(out.a_y), std::abs(out.a_z)) * n >= 0.5;
    return out;
}

}  // namespace rotecho
