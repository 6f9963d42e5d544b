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

#ifndef ROTECHO_ECHO_H
#define ROTECHO_ECHO_H

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rotecho/cr_hamiltonian.h"
#include "rotecho/noise.h"
#include "rotecho/pauli.h"

namespace rotecho {

struct EchoNorms {
    double a_norm = 0;  // |(nu_IX + nu_ZX, nu_IY + nu_ZY, nu_IZ + nu_ZZ)|
    double b_norm = 0;  // |(nu_IX - nu_ZX, nu_IY - nu_ZY, nu_IZ - nu_ZZ)|
    cdouble m1;
    cdouble m2;
};

/// Pauli data of the echoed gate U = XI exp(-i H(-) t) XI exp(-i H(+) t).
///
/// b_coeffs are the coefficients of 2 log(U), so the generating Hamiltonian is
/// sum_P nu_tilde[P] P/2 with nu_tilde[P] = i b_coeffs[P] / (2 t).
struct EchoReport {
    PauliDecomposition a_coeffs{2};
    PauliDecomposition b_coeffs{2};
    std::map<std::string, double> nu_tilde;
    EchoNorms norms;
    double t_half = 0;
    bool analytic = false;
};

CMatrix echo_unitary(const CrCoefficients &c_pos, double t);

/// Closed-form A and B coefficients. Throws DegenerateNorm when A, B, M1 or M2
/// vanishes; use echo_coefficients for an automatic numeric fallback.
EchoReport echo_coefficients_analytic(const CrCoefficients &c_pos, double t);
/// Same report from the brute-force unitary and its principal logarithm.
EchoReport echo_coefficients_numeric(const CrCoefficients &c_pos, double t);
EchoReport echo_coefficients(const CrCoefficients &c_pos, double t);

struct IyClosedForm {
    double exact = 0;
    double approx = 0;
};

/// nu_tilde_IY at a calibrated ZX quarter turn,
///   exact  = pi chi0 sin(eta+ t/2) sin(eta- t/2) / (sqrt(2) t eta+ eta-),
///   approx = pi chi0 (cos(nu_ZX t) - cos(nu_IX t)) / (2 sqrt(2) t (nu_IX^2 - nu_ZX^2)),
/// the latter being the limit where nu_IX and nu_ZX dominate.
IyClosedForm nu_tilde_iy_closed_form(const CrCoefficients &c_pos, double t);

double chi0(const CrCoefficients &c);

enum class ZxTarget {
    /// A_II = 1/sqrt(2): both control blocks rotate by exactly pi/2.
    kQuarterTurn,
    /// nu_tilde_ZX * 2t = pi/2.
    kNuTildeZx,
};

struct ZxCalibration {
    double knob = 0;
    EchoReport report;
    int iterations = 0;
    bool converged = false;
};

/// Secant iteration on a scalar knob of a coefficient family.
ZxCalibration calibrate_zx(const std::function<CrCoefficients(double)> &family, double t, double knob0,
                           ZxTarget target = ZxTarget::kQuarterTurn);
/// Knob = multiplier of the model's ZX term at rotary amplitude x.
ZxCalibration calibrate_zx(const CoefficientModel &model, double x, double t,
                           ZxTarget target = ZxTarget::kQuarterTurn);

enum class ZeroClass { kChi0, kChi1, kChi2, kUnclassified };
std::string_view zero_class_name(ZeroClass c);

struct IyZero {
    double x = 0;
    ZeroClass cls = ZeroClass::kUnclassified;
    int n = 0;
    double chi0 = 0;  // (rad/s)^2
    double chi1 = 0;  // A - 2 n1 pi / t with the nearest n1 >= 1, rad/s
    int n1 = 0;
    double chi2 = 0;  // B - 2 n2 pi / t with the nearest n2 >= 1, rad/s
    int n2 = 0;
};

struct ZeroClassReport {
    std::vector<IyZero> roots;
    bool identically_zero = false;
};

/// Roots of nu_tilde_IY(x) on [x_lo, x_hi]: sign changes on a uniform grid of
/// `grid_points` points, refined by bisection, then labelled by whichever of
/// chi0, chi1,n, chi2,n is closest to zero in units of its natural scale.
ZeroClassReport find_iy_zeros(const CoefficientModel &model, double x_lo, double x_hi, double t,
                              int grid_points = 2001);

struct EpgEstimate {
    double coherent = 0;
    double coherence_limit = 0;
    double total = 0;
};

/// Coherent error against exp(-i pi/4 ZX), the T1/T2 limit of independent
/// amplitude and phase damping over t_gate, and 1 - (1 - c)(1 - l).
EpgEstimate epg_estimate(const CMatrix &u_actual, const NoiseParams &noise, double t_gate);

/// Average gate infidelity of a unitary with respect to a target unitary.
double unitary_infidelity(const CMatrix &u_target, const CMatrix &u_actual);
/// 1 - average fidelity of independent per-qubit damping over duration t.
double coherence_limit(const NoiseParams &noise, double t);

/// Ideal exp(-i pi/4 ZX) followed by the measured error terms: the ZX
/// component of the generating Hamiltonian is replaced by its ideal value.
CMatrix error_terms_unitary(const EchoReport &report);

struct SweepRow {
    double x = 0;
    EchoReport report;
    double epg_total = 0;
};

std::vector<SweepRow> sweep_rotary(const CoefficientModel &model, const std::vector<double> &x_grid, double t,
                                   const NoiseParams &noise, double t_gate);

}  // namespace rotecho

#endif
