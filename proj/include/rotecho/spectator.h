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

#ifndef ROTECHO_SPECTATOR_H
#define ROTECHO_SPECTATOR_H

#include <vector>

#include "rotecho/pauli.h"

namespace rotecho {

// Two-qubit labels in this module are Target x Spectator.

/// xi = J^2 (d1 + d2) / ((D + d1)(D - d2)) with D = w1 - w2, all in rad/s.
/// Level combination E11 - E10 - E01 + E00 of the coupled pair equals 2 xi.
double static_zz(double j_coupling, double delta1, double delta2, double detuning);

struct SpectatorTerms {
    double nu_yz = 0;
    double nu_zz = 0;
};

/// First-order rotary suppression: nu_YZ = xi (1 - cos W t) / (W t), nu_ZZ = xi sin(W t) / (W t).
SpectatorTerms rotary_suppression(double xi, double omega, double t);

/// Optional second-order knobs added to H(1), even in the drive sign.
struct SpectatorExtras {
    double nu_iz = 0;  // spectator Z
    double nu_zi = 0;  // target Z
};

/// R = R_- R_+ with H_+- = xi ZZ/2 +- omega XI/2 (+ extras), each applied for t.
CMatrix spectator_unitary(double xi, double omega, const SpectatorExtras &extras, double t);

/// Generating Hamiltonian i log(R) / (2t) of the rotary pair.
PauliDecomposition spectator_numeric(double xi, double omega, const SpectatorExtras &extras, double t);

/// nu_tilde (= 2 x Pauli coefficient) for YZ and ZZ from spectator_numeric.
SpectatorTerms spectator_numeric_terms(double xi, double omega, double t, const SpectatorExtras &extras = {});

struct SpectatorSweepRow {
    double omega = 0;
    SpectatorTerms analytic;
    SpectatorTerms numeric;
};

std::vector<SpectatorSweepRow> spectator_sweep(double xi, const std::vector<double> &omegas, double t,
                                               const SpectatorExtras &extras = {});

}  // namespace rotecho

#endif
