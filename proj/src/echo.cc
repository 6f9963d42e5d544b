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

#include "rotecho/echo.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rotecho/errors.h"

namespace rotecho {

namespace {

constexpr cdouble kI(0, 1);
const std::array<std::string_view, 8> kEchoLabels = {"II", "IX", "IY", "IZ", "ZI", "ZX", "ZY", "ZZ"};

double coefficient_scale(const CrCoefficients &c) {
    double s = 0;
    for (std::string_view label : CrCoefficients::labels()) {
        s = std::max(s, std::abs(c.get(label)));
    }
    return s;
}

void fill_nu_tilde(EchoReport &r) {
    const double t = r.t_half;
    for (std::string_view lv : kEchoLabels) {
        cdouble b = r.b_coeffs[lv];
        r.nu_tilde[std::string(lv)] = (kI * b / (2 * t)).real();
    }
}

EchoNorms input_norms(const CrCoefficients &c) {
    EchoNorms n;
    n.a_norm = std::hypot(c.nu_ix + c.nu_zx, c.nu_iy + c.nu_zy, c.nu_iz + c.nu_zz);
    n.b_norm = std::hypot(c.nu_ix - c.nu_zx, c.nu_iy - c.nu_zy, c.nu_iz - c.nu_zz);
    return n;
}

void fill_block_norms(EchoReport &r) {
    const auto &a = r.a_coeffs;
    cdouble s1 = 0, s2 = 0;
    for (const char *p : {"X", "Y", "Z"}) {
        cdouble ai = a[std::string("I") + p];
        cdouble az = a[std::string("Z") + p];
        s1 += (ai + az) * (ai + az);
        s2 += (ai - az) * (ai - az);
    }
    r.norms.m1 = std::sqrt(s1);
    r.norms.m2 = std::sqrt(s2);
}

}  // namespace

double chi0(const CrCoefficients &c) {
    return c.nu_ix * c.nu_iz - c.nu_zx * c.nu_zz;
}

CMatrix echo_unitary(const CrCoefficients &c_pos, double t) {
    CMatrix xi = pauli_matrix("XI");
    CMatrix u_pos = mat_exp(build_hamiltonian(c_pos), t);
    CMatrix u_neg = mat_exp(build_hamiltonian(negate_drive(c_pos)), t);
    return xi * u_neg * xi * u_pos;
}

EchoReport echo_coefficients_analytic(const CrCoefficients &c, double t) {
    if (!(t > 0)) {
        throw InvalidInput("echo duration must be positive");
    }
    EchoReport r;
    r.t_half = t;
    r.analytic = true;
    r.norms = input_norms(c);
    const double a = r.norms.a_norm;
    const double b = r.norms.b_norm;
    const double scale = coefficient_scale(c);
    if (a <= 1e-12 * scale || b <= 1e-12 * scale || scale == 0) {
        throw DegenerateNorm("echo norm A or B vanishes; use the numeric path");
    }
    const double sa = std::sin(a * t / 2), ca = std::cos(a * t / 2);
    const double sb = std::sin(b * t / 2), cb = std::cos(b * t / 2);
    const double ab = a * b;
    const double ix = c.nu_ix, iy = c.nu_iy, iz = c.nu_iz, zx = c.nu_zx, zy = c.nu_zy, zz = c.nu_zz;

    PauliDecomposition &A = r.a_coeffs;
    A.set("II", ca * cb + ((ix * ix + iy * iy - iz * iz) - (zx * zx + zy * zy - zz * zz)) * sa * sb / ab);
    A.set("IX", 2.0 * kI * (iy * iz - zy * zz) * sa * sb / ab);
    A.set("IY", -2.0 * kI * (ix * iz - zx * zz) * sa * sb / ab);
    A.set("IZ", -kI * (a * (iz - zz) * ca * sb + b * (iz + zz) * sa * cb) / ab);
    A.set("ZI", 0.0);
    A.set("ZX", kI * (a * (ix - zx) * ca * sb - b * (ix + zx) * sa * cb) / ab);
    A.set("ZY", kI * (a * (iy - zy) * ca * sb - b * (iy + zy) * sa * cb) / ab);
    A.set("ZZ", -2.0 * kI * (iy * zx - ix * zy) * sa * sb / ab);

    fill_block_norms(r);
    const cdouble m1 = r.norms.m1, m2 = r.norms.m2;
    if (std::abs(m1) < 1e-12 || std::abs(m2) < 1e-12) {
        throw DegenerateNorm("echo block norm M1 or M2 vanishes; use the numeric path");
    }
    const cdouble aii = A["II"];
    const cdouble lm1 = std::log(aii - m1), lp1 = std::log(aii + m1);
    const cdouble lm2 = std::log(aii - m2), lp2 = std::log(aii + m2);
    const cdouble den = 2.0 * m1 * m2;

    PauliDecomposition &B = r.b_coeffs;
    B.set("II", 0.5 * (lm2 + lp2) + 0.5 * (lm1 + lp1));
    B.set("ZI", 0.0);
    for (const char *p : {"X", "Y", "Z"}) {
        cdouble ai = A[std::string("I") + p];
        cdouble az = A[std::string("Z") + p];
        cdouble common = -(ai + az) * m2 * (lm1 - lp1) / den;
        B.set(std::string("I") + p, ((-ai + az) * m1 * lm2 + (ai - az) * m1 * lp2) / den + common);
        B.set(std::string("Z") + p, ((ai - az) * m1 * lm2 + (-ai + az) * m1 * lp2) / den + common);
    }
    fill_nu_tilde(r);
    return r;
}

EchoReport echo_coefficients_numeric(const CrCoefficients &c, double t) {
    if (!(t > 0)) {
        throw InvalidInput("echo duration must be positive");
    }
    EchoReport r;
    r.t_half = t;
    r.analytic = false;
    r.norms = input_norms(c);
    CMatrix u = echo_unitary(c, t);
    r.a_coeffs = decompose(u);
    PauliDecomposition h = generating_hamiltonian(u, t);
    for (std::string_view lv : kEchoLabels) {
        // nu = 2 c and B = -2 i t nu.
        double nu = 2 * h[lv].real();
        r.b_coeffs.set(lv, cdouble(0, -2 * t * nu));
    }
    fill_block_norms(r);
    fill_nu_tilde(r);
    return r;
}

EchoReport echo_coefficients(const CrCoefficients &c, double t) {
    try {
        return echo_coefficients_analytic(c, t);
    } catch (const DegenerateNorm &) {
        return echo_coefficients_numeric(c, t);
    }
}

IyClosedForm nu_tilde_iy_closed_form(const CrCoefficients &c, double t) {
    if (!(t > 0)) {
        throw InvalidInput("echo duration must be positive");
    }
    EchoNorms n = input_norms(c);
    double scale = coefficient_scale(c);
    if (n.a_norm <= 1e-12 * scale || n.b_norm <= 1e-12 * scale || scale == 0) {
        throw DegenerateNorm("eta+ or eta- vanishes");
    }
    const double k = std::numbers::pi / (std::numbers::sqrt2 * t);
    const double x0 = chi0(c);
    IyClosedForm out;
    out.exact = k * x0 / (n.a_norm * n.b_norm) * std::sin(n.a_norm * t / 2) * std::sin(n.b_norm * t / 2);
    const double den = c.nu_ix * c.nu_ix - c.nu_zx * c.nu_zx;
    if (std::abs(den) <= 1e-12 * scale * scale) {
        // Limit nu_IX -> nu_ZX of (cos(b) - cos(a)) / (a^2 - b^2).
        double w = c.nu_zx * t;
        double sinc_t = w == 0 ? t * t : t * std::sin(w) / c.nu_zx;
        out.approx = k * x0 * sinc_t / 4;
    } else {
        out.approx = k * x0 * (std::cos(c.nu_zx * t) - std::cos(c.nu_ix * t)) / (2 * den);
    }
    return out;
}

ZxCalibration calibrate_zx(const std::function<CrCoefficients(double)> &family, double t, double knob0,
                           ZxTarget target) {
    auto residual = [&](double k, EchoReport &rep) {
        rep = echo_coefficients(family(k), t);
        if (target == ZxTarget::kQuarterTurn) {
            return rep.a_coeffs["II"].real() - std::sqrt(0.5);
        }
        return rep.nu_tilde.at("ZX") * 2 * t - std::numbers::pi / 2;
    };
    const double tol = target == ZxTarget::kQuarterTurn ? 1e-14 : 1e-12;
    ZxCalibration cal;
    double k0 = knob0;
    double k1 = knob0 == 0 ? 1e-3 : knob0 * (1 + 1e-3);
    EchoReport r0, r1;
    double f0 = residual(k0, r0);
    double f1 = residual(k1, r1);
    for (cal.iterations = 0; cal.iterations < 200; cal.iterations++) {
        if (std::abs(f1) <= tol) {
            cal.converged = true;
            break;
        }
        if (f1 == f0) {
            break;
        }
        double k2 = k1 - f1 * (k1 - k0) / (f1 - f0);
        k0 = k1;
        f0 = f1;
        r0 = r1;
        k1 = k2;
        f1 = residual(k1, r1);
    }
    if (!cal.converged && std::abs(f1) <= 100 * tol) {
        cal.converged = true;
    }
    cal.knob = k1;
    cal.report = r1;
    return cal;
}

ZxCalibration calibrate_zx(const CoefficientModel &model, double x, double t, ZxTarget target) {
    return calibrate_zx(
        [&](double s) {
            return model.with_zx_scale(s).at(x);
        },
        t, 1.0, target);
}

std::string_view zero_class_name(ZeroClass c) {
    switch (c) {
        case ZeroClass::kChi0:
            return "chi0";
        case ZeroClass::kChi1:
            return "chi1";
        case ZeroClass::kChi2:
            return "chi2";
        case ZeroClass::kUnclassified:
            return "unclassified";
    }
    return "unclassified";
}

namespace {

IyZero classify_zero(const CrCoefficients &c, double x, double t) {
    IyZero z;
    z.x = x;
    EchoNorms n = input_norms(c);
    const double w = 2 * std::numbers::pi / t;
    z.chi0 = chi0(c);
    z.n1 = std::max(1, static_cast<int>(std::lround(n.a_norm / w)));
    z.chi1 = n.a_norm - z.n1 * w;
    z.n2 = std::max(1, static_cast<int>(std::lround(n.b_norm / w)));
    z.chi2 = n.b_norm - z.n2 * w;
    double r0 = std::abs(z.chi0) / (std::abs(c.nu_ix * c.nu_iz) + std::abs(c.nu_zx * c.nu_zz) + 1e-300);
    double r1 = std::abs(z.chi1) / w;
    double r2 = std::abs(z.chi2) / w;
    double best = std::min({r0, r1, r2});
    if (best > 1e-6) {
        z.cls = ZeroClass::kUnclassified;
    } else if (best == r0) {
        z.cls = ZeroClass::kChi0;
    } else if (best == r1) {
        z.cls = ZeroClass::kChi1;
        z.n = z.n1;
    } else {
        z.cls = ZeroClass::kChi2;
        z.n = z.n2;
    }
    return z;
}

}  // namespace

ZeroClassReport find_iy_zeros(const CoefficientModel &model, double x_lo, double x_hi, double t, int grid_points) {
    if (model.mode() != CoefficientModel::Mode::kPhenomenological) {
        throw UnsupportedMode("find_iy_zeros needs a phenomenological coefficient model");
    }
    if (!(x_hi > x_lo) || grid_points < 2) {
        throw InvalidInput("find_iy_zeros needs x_lo < x_hi and at least two grid points");
    }
    auto f = [&](double x) {
        return echo_coefficients(model.at(x), t).nu_tilde.at("IY");
    };
    std::vector<double> xs(grid_points), fs(grid_points);
    double scale = 0, peak = 0;
    for (int k = 0; k < grid_points; k++) {
        xs[k] = x_lo + (x_hi - x_lo) * k / (grid_points - 1);
        EchoReport rep = echo_coefficients(model.at(xs[k]), t);
        fs[k] = rep.nu_tilde.at("IY");
        peak = std::max(peak, std::abs(fs[k]));
        for (const auto &[_, v] : rep.nu_tilde) {
            scale = std::max(scale, std::abs(v));
        }
    }
    ZeroClassReport report;
    if (peak <= 1e-10 * std::max(scale, 1.0 / t)) {
        report.identically_zero = true;
        return report;
    }
    for (int k = 0; k + 1 < grid_points; k++) {
        double a = xs[k], b = xs[k + 1], fa = fs[k], fb = fs[k + 1];
        double root;
        if (fa == 0) {
            root = a;
        } else if (fa * fb < 0) {
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); it++) {
                double m = 0.5 * (a + b);
                double fm = f(m);
                if (fm == 0) {
                    a = b = m;
                    break;
                }
                if ((fm < 0) == (fa < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            root = 0.5 * (a + b);
        } else {
            continue;
        }
        report.roots.push_back(classify_zero(model.at(root), root, t));
    }
    if (fs.back() == 0) {
        report.roots.push_back(classify_zero(model.at(xs.back()), xs.back(), t));
    }
    return report;
}

double unitary_infidelity(const CMatrix &u_target, const CMatrix &u_actual) {
    const double d = static_cast<double>(u_target.rows());
    double overlap = std::norm((u_target.adjoint() * u_actual).trace());
    return 1 - (overlap + d) / (d * (d + 1));
}

double coherence_limit(const NoiseParams &noise, double t) {
    if (noise.qubits.empty()) {
        return 0;
    }
    double trace = 1;
    double d = 1;
    for (const QubitNoise &q : noise.qubits) {
        double ga = q.gamma_a(t), gp = q.gamma_p(t);
        trace *= 1 + 2 * std::sqrt((1 - ga) * (1 - gp)) + (1 - ga);
        d *= 2;
    }
    double f_pro = trace / (d * d);
    double f_avg = (d * f_pro + 1) / (d + 1);
    return 1 - f_avg;
}

EpgEstimate epg_estimate(const CMatrix &u_actual, const NoiseParams &noise, double t_gate) {
    if (u_actual.rows() != 4 || !is_unitary(u_actual, 1e-9)) {
        throw InvalidInput("epg_estimate needs a 4x4 unitary");
    }
    if (!noise.qubits.empty() && noise.qubits.size() != 2) {
        throw InvalidInput("epg_estimate needs noise parameters for exactly two qubits");
    }
    CMatrix ideal = mat_exp(std::numbers::pi / 4 * pauli_matrix("ZX"), 1.0);
    EpgEstimate e;
    e.coherent = std::max(0.0, unitary_infidelity(ideal, u_actual));
    e.coherence_limit = coherence_limit(noise, t_gate);
    e.total = 1 - (1 - e.coherent) * (1 - e.coherence_limit);
    return e;
}

CMatrix error_terms_unitary(const EchoReport &report) {
    const double t = report.t_half;
    CMatrix h = CMatrix::Zero(4, 4);
    for (const auto &[label, nu] : report.nu_tilde) {
        if (label == "II" || label == "ZX") {
            continue;
        }
        h += (nu / 2) * pauli_matrix(label);
    }
    h += (std::numbers::pi / (4 * t) / 2) * pauli_matrix("ZX");
    return mat_exp(h, 2 * t);
}

std::vector<SweepRow> sweep_rotary(const CoefficientModel &model, const std::vector<double> &x_grid, double t,
                                   const NoiseParams &noise, double t_gate) {
    std::vector<SweepRow> rows;
    rows.reserve(x_grid.size());
    for (double x : x_grid) {
        SweepRow row;
        row.x = x;
        row.report = echo_coefficients(model.at(x), t);
        row.epg_total = epg_estimate(error_terms_unitary(row.report), noise, t_gate).total;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rotecho
