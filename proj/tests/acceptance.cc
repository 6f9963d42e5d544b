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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "rotecho/channels.h"
#include "rotecho/echo.h"
#include "rotecho/fit.h"
#include "rotecho/heat.h"
#include "rotecho/qv.h"
#include "rotecho/spectator.h"
#include "rotecho/units.h"
#include "test_util.h"

using namespace rotecho;
using rotecho_test::oracle_ptm;
using rotecho_test::random_unitary;
using rotecho_test::taylor_exp;
using rotecho_test::test_coeff;
using rotecho_test::test_kron;
using rotecho_test::test_pauli;

namespace {

constexpr double kT = 206.22e-9;
const char *const kLabels[] = {"II", "IX", "IY", "IZ", "ZI", "ZX", "ZY", "ZZ"};

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Collects failures; the first few are kept for the report line.
class Check {
   public:
    void require(bool ok, const std::string &what) {
        if (!ok) {
            failures_++;
            if (failures_ <= 3) {
                notes_ += (notes_.empty() ? "" : "; ") + what;
            }
        }
    }
    void note(const std::string &s) {
        info_ += (info_.empty() ? "" : ", ") + s;
    }
    Outcome done() const {
        std::string d = info_;
        if (failures_ > 0) {
            d += (d.empty() ? "" : " | ") + std::to_string(failures_) + " failed: " + notes_;
        }
        return {failures_ == 0, d};
    }

   private:
    int failures_ = 0;
    std::string notes_;
    std::string info_;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CMatrix oracle_h(const CrCoefficients &c, double sign) {
    CMatrix h = CMatrix::Zero(4, 4);
    h += sign * c.nu_ix / 2 * test_pauli("IX");
    h += sign * c.nu_iy / 2 * test_pauli("IY");
    h += c.nu_iz / 2 * test_pauli("IZ");
    h += c.nu_zi / 2 * test_pauli("ZI");
    h += sign * c.nu_zx / 2 * test_pauli("ZX");
    h += sign * c.nu_zy / 2 * test_pauli("ZY");
    h += c.nu_zz / 2 * test_pauli("ZZ");
    return h;
}

CMatrix oracle_echo(const CrCoefficients &c, double t) {
    CMatrix xi = test_pauli("XI");
    return xi * taylor_exp(oracle_h(c, -1), t) * xi * taylor_exp(oracle_h(c, +1), t);
}

Outcome criterion_1() {
    Check c;
    std::minstd_rand rng(202);
    std::uniform_real_distribution<double> u(-2 * std::numbers::pi / kT, 2 * std::numbers::pi / kT);
    double worst = 0, elapsed = 0;
    for (int k = 0; k < 200; k++) {
        CrCoefficients co;
        for (std::string_view label : CrCoefficients::labels()) {
            co.set(label, u(rng));
        }
        const auto t0 = std::chrono::steady_clock::now();
        EchoReport r = echo_coefficients_analytic(co, kT);
        elapsed += seconds_since(t0);
        CMatrix brute = oracle_echo(co, kT);
        for (const char *label : kLabels) {
            worst = std::max(worst, std::abs(r.a_coeffs[label] - test_coeff(brute, label)));
        }
    }
    c.require(worst < 1e-10, "max |dA| " + fmt(worst));
    c.require(elapsed < 5, "runtime " + fmt(elapsed) + " s");
    c.note("max |dA| " + fmt(worst) + ", 200 sets in " + fmt(elapsed) + " s");
    return c.done();
}

Outcome criterion_2() {
    Check c;
    std::minstd_rand rng(606);
    std::uniform_real_distribution<double> u(-khz_to_rad_s(300), khz_to_rad_s(300));
    const cdouble target(0, std::sqrt(0.5));
    double worst_m = 0, worst_b = 0;
    for (int k = 0; k < 20; k++) {
        CrCoefficients base;
        for (std::string_view label : CrCoefficients::labels()) {
            base.set(label, u(rng));
        }
        auto family = [&](double s) {
            CrCoefficients d = base;
            d.nu_zx = s;
            return d;
        };
        ZxCalibration cal = calibrate_zx(family, kT, std::numbers::pi / 4 / kT);
        c.require(cal.converged, "calibration " + std::to_string(k) + " did not converge");
        const EchoReport &r = cal.report;
        worst_m = std::max({worst_m, std::abs(r.norms.m1 - target), std::abs(r.norms.m2 - target)});
        for (const char *label : kLabels) {
            if (std::string_view(label) != "II") {
                cdouble want = std::numbers::pi / std::numbers::sqrt2 * r.a_coeffs[label];
                worst_b = std::max(worst_b, std::abs(r.b_coeffs[label] - want));
            }
        }
    }
    c.require(worst_m < 1e-9, "M deviation " + fmt(worst_m));
    c.require(worst_b < 1e-9, "B deviation " + fmt(worst_b));
    c.note("max |M - i/sqrt2| " + fmt(worst_m) + ", max |B - pi A/sqrt2| " + fmt(worst_b));
    return c.done();
}

Outcome criterion_3() {
    Check c;
    const double zx = std::numbers::pi / 4 / kT;
    const double eps = khz_to_rad_s(5);
    const double slope = mhz_to_rad_s(1);
    CoefficientModel m = CoefficientModel::phenomenological(
        {{"IX", {0, slope, 0, true}}, {"ZX", {zx, 0, 0, true}}, {"IZ", {eps, 0, 0, false}}});
    const double lo = 0.5, hi = 40.0;
    const int points = 4001;
    const double dx = (hi - lo) / (points - 1);
    ZeroClassReport rep = find_iy_zeros(m, lo, hi, kT, points);
    const double w = 2 * std::numbers::pi / kT;
    struct Want {
        double x;
        ZeroClass cls;
        int n;
    };
    std::vector<Want> want;
    for (int n = 1; n < 40; n++) {
        // nu_IX = n w -/+ nu_ZX, the first-order prediction.
        for (auto [ix, cls] : {std::pair{n * w - zx, ZeroClass::kChi1}, std::pair{n * w + zx, ZeroClass::kChi2}}) {
            if (ix / slope > lo && ix / slope < hi) {
                want.push_back({ix / slope, cls, n});
            }
        }
    }
    std::sort(want.begin(), want.end(), [](const Want &a, const Want &b) {
        return a.x < b.x;
    });
    c.require(rep.roots.size() == want.size(),
              std::to_string(rep.roots.size()) + " roots, " + std::to_string(want.size()) + " predicted");
    double worst = 0;
    for (std::size_t k = 0; k < std::min(want.size(), rep.roots.size()); k++) {
        worst = std::max(worst, std::abs(rep.roots[k].x - want[k].x));
        c.require(rep.roots[k].cls == want[k].cls && rep.roots[k].n == want[k].n,
                  "root " + std::to_string(k) + " classified " + std::string(zero_class_name(rep.roots[k].cls)));
    }
    c.require(worst <= dx, "max offset " + fmt(worst) + " > grid " + fmt(dx));
    c.note(std::to_string(rep.roots.size()) + " roots, max offset " + fmt(worst) + " (grid " + fmt(dx) + ")");
    return c.done();
}

double r_squared(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); k++) {
        mx += x[k] / n;
        my += y[k] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); k++) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
    }
    return sxy * sxy / (sxx * syy);
}

Outcome criterion_4() {
    Check c;
    std::minstd_rand rng(4242);
    std::uniform_real_distribution<double> small(-khz_to_rad_s(10), khz_to_rad_s(10));
    std::uniform_real_distribution<double> ix(-khz_to_rad_s(500), khz_to_rad_s(500));
    HeatConfig at8;
    at8.reps = {8};
    HeatConfig sweep;
    sweep.reps = {2, 4, 6, 8, 10, 12, 14};
    double worst_ratio = 0, worst_r2 = 1;
    for (int k = 0; k < 50; k++) {
        CrCoefficients co;
        co.nu_ix = ix(rng);
        co.nu_iy = small(rng);
        co.nu_iz = small(rng);
        co.nu_zi = small(rng);
        co.nu_zy = small(rng);
        co.nu_zz = small(rng);
        auto family = [co](double s) {
            CrCoefficients d = co;
            d.nu_zx = s;
            return d;
        };
        ZxCalibration cal = calibrate_zx(family, kT, std::numbers::pi / 4 / kT);
        c.require(cal.converged, "calibration " + std::to_string(k));
        CMatrix u = oracle_echo(family(cal.knob), kT);
        Heat2qResult r = reconstruct_2q(run_heat_2q(u, at8), 8, kT);
        for (const char *label : {"IY", "IZ", "ZY", "ZZ"}) {
            cdouble want = test_coeff(u, label);
            const double tol = std::max(0.05 * std::abs(want), 1e-4);
            worst_ratio = std::max(worst_ratio, std::abs(r.report.a_coeffs[label] - want) / tol);
        }
        HeatRecord rec = run_heat_2q(u, sweep);
        for (int j = 0; j < 2; j++) {
            std::vector<double> xs, ys, zs;
            for (int n : sweep.reps) {
                xs.push_back(n);
                ys.push_back(rec.at(HeatKind::kY, j, n).y_err);
                zs.push_back(rec.at(HeatKind::kZ, j, n).z_err);
            }
            worst_r2 = std::min({worst_r2, r_squared(xs, ys), r_squared(xs, zs)});
        }
    }
    c.require(worst_ratio <= 1, "error / tolerance " + fmt(worst_ratio));
    c.require(worst_r2 > 0.999, "R^2 " + fmt(worst_r2));
    c.note("max error/tolerance " + fmt(worst_ratio) + ", min R^2 " + fmt(worst_r2));
    return c.done();
}

double log_slope(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); k++) {
        mx += std::log(x[k]) / n;
        my += std::log(y[k]) / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < x.size(); k++) {
        sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
        sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
    }
    return sxy / sxx;
}

Outcome criterion_5() {
    Check c;
    const double t = kT;
    double worst = 0;
    for (double xit : {0.001, 0.01, 0.03, 0.05}) {
        const double xi = xit / t;
        for (int k = 0; k <= 78; k++) {
            const double wt = 0.5 + 0.25 * k;
            SpectatorTerms a = rotary_suppression(xi, wt / t, t);
            SpectatorTerms n = spectator_numeric_terms(xi, wt / t, t);
            const double floor = xi * xi * t;
            worst = std::max({worst, std::abs(n.nu_yz - a.nu_yz) / std::max(0.05 * std::abs(a.nu_yz), floor),
                              std::abs(n.nu_zz - a.nu_zz) / std::max(0.05 * std::abs(a.nu_zz), floor)});
        }
    }
    c.require(worst <= 1, "first-order error / tolerance " + fmt(worst));

    const double xi = 0.01;
    std::vector<double> centers, yz, zz;
    for (int k = 0; k <= 8; k++) {
        const double center = 10 * std::pow(10.0, k / 4.0);
        double myz = 0, mzz = 0;
        for (int s = 0; s < 400; s++) {
            const double wt = center - std::numbers::pi + 2 * std::numbers::pi * s / 399;
            SpectatorTerms n = spectator_numeric_terms(xi, wt, 1.0);
            myz = std::max(myz, std::abs(n.nu_yz));
            mzz = std::max(mzz, std::abs(n.nu_zz));
        }
        centers.push_back(center);
        yz.push_back(myz);
        zz.push_back(mzz);
    }
    const double s_yz = log_slope(centers, yz), s_zz = log_slope(centers, zz);
    c.require(std::abs(s_yz + 1) <= 0.05 && std::abs(s_zz + 1) <= 0.05, "slopes " + fmt(s_yz) + " " + fmt(s_zz));

    double suppressed = 0;
    for (double x : {0.005, 0.02, 0.05}) {
        SpectatorTerms n = spectator_numeric_terms(x / t, 2 * std::numbers::pi / t, t);
        suppressed = std::max(suppressed, std::max(std::abs(n.nu_yz), std::abs(n.nu_zz)) / (x / t * x));
    }
    c.require(suppressed < 1, "full-turn residual / xi^2 t " + fmt(suppressed));
    c.note("max error/tolerance " + fmt(worst) + ", slopes " + fmt(s_yz) + "/" + fmt(s_zz) +
           ", full-turn residual " + fmt(suppressed) + " xi^2 t");
    return c.done();
}

std::vector<CMatrix> kraus_damping(double ga, double gp) {
    CMatrix a0(2, 2), a1(2, 2), p0(2, 2), p1(2, 2);
    a0 << 1, 0, 0, std::sqrt(1 - ga);
    a1 << 0, std::sqrt(ga), 0, 0;
    p0 << 1, 0, 0, std::sqrt(1 - gp);
    p1 << 0, 0, 0, std::sqrt(gp);
    return {a0 * p0, a0 * p1, a1 * p0, a1 * p1};
}

std::vector<CMatrix> tensor_kraus(const std::vector<CMatrix> &a, const std::vector<CMatrix> &b) {
    std::vector<CMatrix> out;
    for (const auto &x : a) {
        for (const auto &y : b) {
            out.push_back(test_kron(x, y));
        }
    }
    return out;
}

double oracle_unitarity(const Eigen::MatrixXd &r) {
    const auto n = r.rows() - 1;
    return r.bottomRightCorner(n, n).squaredNorm() / static_cast<double>(n);
}

std::vector<CMatrix> random_unital(int dim, std::minstd_rand &rng) {
    std::uniform_real_distribution<double> w(0.0, 1.0);
    double p[3], total = 0;
    for (double &x : p) {
        x = w(rng);
        total += x;
    }
    std::vector<CMatrix> out;
    for (double x : p) {
        out.push_back(std::sqrt(x / total) * random_unitary(dim, rng));
    }
    return out;
}

Outcome criterion_6() {
    Check c;
    std::minstd_rand rng(66);
    std::uniform_real_distribution<double> g(0, 1);
    double worst = 0, worst_eq = 0;
    for (int n = 1; n <= 3; n++) {
        for (int k = 0; k < 100; k++) {
            std::vector<std::pair<double, double>> gammas;
            std::vector<CMatrix> kraus{CMatrix::Identity(1, 1)};
            for (int q = 0; q < n; q++) {
                gammas.emplace_back(g(rng), g(rng));
                kraus = tensor_kraus(kraus, kraus_damping(gammas.back().first, gammas.back().second));
            }
            worst = std::max(worst, std::abs(unitarity_independent(gammas) - oracle_unitarity(oracle_ptm(kraus))));
        }
    }
    for (int k = 0; k < 100; k++) {
        const double ga = g(rng), gp = g(rng);
        auto kraus = tensor_kraus(kraus_damping(ga, gp), kraus_damping(ga, gp));
        worst_eq = std::max(worst_eq, std::abs(unitarity_2q_equal(ga, gp) - oracle_unitarity(oracle_ptm(kraus))));
    }
    c.require(worst < 1e-12, "independent formula " + fmt(worst));
    c.require(worst_eq < 1e-12, "equal-parameter form " + fmt(worst_eq));
    c.note("max deviation " + fmt(worst) + " (n = 1..3), " + fmt(worst_eq) + " (2Q equal)");
    return c.done();
}

Outcome criterion_7() {
    Check c;
    std::minstd_rand rng(77);
    double worst = 0;
    for (int k = 0; k < 100; k++) {
        auto k1 = random_unital(4, rng);
        auto k2 = random_unital(2, rng);
        const double u1 = oracle_unitarity(oracle_ptm(k1));
        const double u2 = oracle_unitarity(oracle_ptm(k2));
        const double full = oracle_unitarity(oracle_ptm(tensor_kraus(k1, k2)));
        worst = std::max(worst, std::abs(product_unitarity_unital({u1, u2}, {4, 2}) - full));
    }
    c.require(worst < 1e-12, "product vs full " + fmt(worst));
    CMatrix zz = taylor_exp(test_pauli("IZZ"), 0.15);
    PTMatrix local = tensor({depolarizing_ptm(0.99, 2), depolarizing_ptm(0.98, 1)});
    PTMatrix conjugated =
        compose(ptm_from_unitary(zz), compose(local, ptm_from_unitary(CMatrix(zz.adjoint()))));
    const double gap = unitarity_report(conjugated, {2, 1}).e_entanglement;
    c.require(gap > 0, "e_E " + fmt(gap));
    c.note("max |u_p - u| " + fmt(worst) + ", ZZ-conjugated e_E " + fmt(gap));
    return c.done();
}

Outcome criterion_8() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    PurityRbConfig cfg;
    for (int m = 1; m <= 50; m++) {
        cfg.lengths.push_back(m);
    }
    cfg.n_sequences = 200;
    std::vector<std::pair<std::string, PTMatrix>> channels{
        {"dep1", depolarizing_ptm(0.98, 1)},
        {"damp1", damping_ptm(0.02, 0.01)},
        {"dep2", depolarizing_ptm(0.985, 2)},
        {"damp2", tensor(damping_ptm(0.01, 0.005), damping_ptm(0.015, 0.01))},
    };
    double worst = 0;
    for (const auto &[name, r] : channels) {
        const double rel = std::abs(purity_rb(r, cfg).u_hat / unitarity_ptm(r) - 1);
        worst = std::max(worst, rel);
        c.require(rel <= 0.005, name + " off by " + fmt(rel));
    }
    const double elapsed = seconds_since(t0);
    c.require(elapsed < 30, "runtime " + fmt(elapsed) + " s");
    c.note("max relative error " + fmt(worst) + ", " + fmt(elapsed) + " s");
    return c.done();
}

Outcome criterion_9() {
    Check c;
    std::minstd_rand rng(99);
    double worst = 0, product = 0, invariance = 0;
    for (auto [d1, d2] : {std::pair{2, 2}, std::pair{4, 2}}) {
        for (int k = 0; k < 100; k++) {
            CMatrix u = random_unitary(d1 * d2, rng);
            worst = std::max(worst, std::abs(unitary_entanglement(u, d1, d2) - unitary_entanglement_reduced(u, d1, d2)));
            CMatrix p = test_kron(random_unitary(d1, rng), random_unitary(d2, rng));
            product = std::max({product, std::abs(unitary_entanglement(p, d1, d2)),
                                std::abs(unitary_entanglement_reduced(p, d1, d2))});
            CMatrix left = test_kron(random_unitary(d1, rng), random_unitary(d2, rng));
            CMatrix right = test_kron(random_unitary(d1, rng), random_unitary(d2, rng));
            invariance = std::max(
                invariance, std::abs(unitary_entanglement(left * u * right, d1, d2) - unitary_entanglement(u, d1, d2)));
        }
    }
    c.require(worst < 1e-12, "paths differ by " + fmt(worst));
    c.require(product < 1e-12, "product E " + fmt(product));
    c.require(invariance < 1e-10, "local invariance " + fmt(invariance));
    c.note("paths " + fmt(worst) + ", product " + fmt(product) + ", local " + fmt(invariance));
    return c.done();
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion_10() {
    Check c;
    std::vector<double> grid;
    for (int k = 0; k <= 40; k++) {
        grid.push_back(-2 + 0.1 * k);
    }
    struct Case {
        std::string name;
        ThetaModel truth;
        std::vector<ThetaParam> mask;
    };
    for (const Case &cs : {Case{"reference_2q", ThetaModel::reference_2q(), reference_mask_2q()},
                           Case{"reference_3q", ThetaModel::reference_3q(), reference_mask_3q()}}) {
        SweepDataset gold = SweepDataset::from_csv(read_file(std::string(ROTECHO_SOURCE_DIR) + "/data/golden/" +
                                                             cs.name + "_sweep.csv"));
        SweepDataset now = synthesize_sweep(cs.truth, grid);
        double drift = gold.rows.size() == now.rows.size() ? 0 : INFINITY;
        for (std::size_t k = 0; k < std::min(gold.rows.size(), now.rows.size()); k++) {
            drift = std::max(drift, std::abs(gold.rows[k].value - now.rows[k].value) /
                                        (1e-9 * std::abs(gold.rows[k].value) + 1e-9));
        }
        c.require(drift <= 1, cs.name + " golden drift");

        ThetaModel init = cs.truth;
        for (std::size_t k = 0; k < cs.mask.size(); k++) {
            set_param(init, cs.mask[k], get_param(cs.truth, cs.mask[k]) * (k % 2 ? 1.2 : 0.8));
        }
        FitOptions opts;
        opts.restarts = 2;
        ThetaFit fit = fit_theta(gold, cs.mask, init, opts);
        double worst = 0;
        for (const auto &p : cs.mask) {
            worst = std::max(worst, std::abs(get_param(fit.model, p) / get_param(cs.truth, p) - 1));
        }
        c.require(fit.converged, cs.name + " fit did not converge");
        c.require(worst <= 0.05, cs.name + " bold error " + fmt(worst));
        c.require(fit.model.term("ZXI").theta0 == cs.truth.term("ZXI").theta0, cs.name + " ZXI moved");
        c.require(fit.model.t_pulse() == 206.22e-9, cs.name + " t moved");
        c.note(cs.name + " max bold error " + fmt(worst));
    }
    c.require(ThetaModel::reference_2q().term("ZXI").theta0 == std::numbers::pi / 8, "theta0 ZXI != pi/8");
    return c.done();
}

std::vector<std::uint32_t> oracle_heavy(const std::vector<double> &p) {
    std::vector<double> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
    std::vector<std::uint32_t> out;
    for (std::uint32_t x = 0; x < p.size(); x++) {
        if (p[x] > median) {
            out.push_back(x);
        }
    }
    return out;
}

/// Sends basis state x to the state whose qubit order[k] sits in position k.
CMatrix qubit_permutation(const std::vector<int> &order) {
    const int w = static_cast<int>(order.size());
    CMatrix p = CMatrix::Zero(1 << w, 1 << w);
    for (int x = 0; x < (1 << w); x++) {
        int y = 0;
        for (int k = 0; k < w; k++) {
            y |= ((x >> (w - 1 - order[k])) & 1) << (w - 1 - k);
        }
        p(y, x) = 1;
    }
    return p;
}

struct MeanSe {
    double mean = 0;
    double se = 0;
};

MeanSe mean_se(const std::vector<double> &v) {
    MeanSe out;
    const double n = static_cast<double>(v.size());
    for (double x : v) {
        out.mean += x / n;
    }
    double ss = 0;
    for (double x : v) {
        ss += (x - out.mean) * (x - out.mean);
    }
    out.se = std::sqrt(ss / (n - 1) / n);
    return out;
}

Outcome criterion_11() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();

    auto a = generate_circuits(4, 20, 3), b = generate_circuits(4, 20, 3);
    bool same = true;
    for (std::size_t k = 0; k < a.size(); k++) {
        same = same && circuit_unitary(a[k]) == circuit_unitary(b[k]);
    }
    c.require(same, "circuits not deterministic");

    int mismatches = 0;
    for (int w = 2; w <= 4; w++) {
        for (const auto &circ : generate_circuits(w, 100, 11)) {
            mismatches += heavy_set(circ) != oracle_heavy(ideal_probabilities(circ));
        }
    }
    c.require(mismatches == 0, std::to_string(mismatches) + " heavy-set mismatches");

    // Coherent IY angles a = nu_IY t of a few tens of kHz over one gate.
    auto circuits = generate_circuits(4, 150, 1);
    std::vector<HopResult> hops;
    for (double angle : {0.0, 0.02, 0.05}) {
        hops.push_back(hop_estimate(circuits, qv_coherent_error(PauliLabel("IY"), angle)));
    }
    std::string zs;
    for (int k = 0; k < 2; k++) {
        std::vector<double> drop(circuits.size());
        for (std::size_t i = 0; i < drop.size(); i++) {
            drop[i] = hops[k].per_circuit[i] - hops[k + 1].per_circuit[i];
        }
        MeanSe d = mean_se(drop);
        const double z = d.mean / d.se;
        zs += (k ? "/" : "") + fmt(z);
        c.require(z > 3, "IY step " + std::to_string(k) + " paired z " + fmt(z));
    }
    c.note("IY HOP at 0/0.02/0.05 rad " + fmt(hops[0].mean_hop) + "/" + fmt(hops[1].mean_hop) + "/" + fmt(hops[2].mean_hop) +
           " (paired z " + zs + ")");

    // Independent sampling of the same circuit class: uniform pairings, Haar blocks.
    std::minstd_rand rng(1111);
    std::vector<double> mc;
    for (int k = 0; k < 20000; k++) {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
        psi(0) = 1;
        for (int layer = 0; layer < 4; layer++) {
            std::vector<int> order{0, 1, 2, 3};
            std::shuffle(order.begin(), order.end(), rng);
            CMatrix p = qubit_permutation(order);
            psi = p.transpose() * test_kron(random_unitary(4, rng), random_unitary(4, rng)) * p * psi;
        }
        std::vector<double> prob(16);
        for (int x = 0; x < 16; x++) {
            prob[x] = std::norm(psi(x));
        }
        double mass = 0;
        for (auto x : oracle_heavy(prob)) {
            mass += prob[x];
        }
        mc.push_back(mass);
    }
    MeanSe oracle = mean_se(mc);
    MeanSe ens = mean_se(hop_estimate(generate_circuits(4, 500, 2), QvNoise{}).per_circuit);
    const double band = 1.96 * std::hypot(oracle.se, ens.se);
    c.require(std::abs(ens.mean - oracle.mean) <= band,
              "width-4 HOP " + fmt(ens.mean) + " outside " + fmt(oracle.mean) + " +- " + fmt(band));
    c.note("width-4 HOP " + fmt(ens.mean) + " vs oracle " + fmt(oracle.mean) + " +- " + fmt(band));

    const double elapsed = seconds_since(t0);
    c.require(elapsed < 300, "runtime " + fmt(elapsed) + " s");
    c.note(fmt(elapsed) + " s");
    return c.done();
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3,  criterion_4,
                                                         criterion_5, criterion_6, criterion_7,  criterion_8,
                                                         criterion_9, criterion_10, criterion_11};
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); k++) {
        Outcome o;
        try {
            o = criteria[k]();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    }
    std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
