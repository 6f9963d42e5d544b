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

#include "rotecho/spectator.h"

#include <cmath>

#include "rotecho/errors.h"

namespace rotecho {

double static_zz(double j_coupling, double delta1, double delta2, double detuning) {
    const double d1 = detuning + delta1;
    const double d2 = detuning - delta2;
    const double guard = 1e-3 * std::abs(j_coupling);
    if (std::abs(d1) < guard || std::abs(d2) < guard || d1 == 0 || d2 == 0) {
        throw NearResonance("static ZZ pole: detuning too close to an anharmonicity collision");
    }
    return j_coupling * j_coupling * (delta1 + delta2) / (d1 * d2);
}

SpectatorTerms rotary_suppression(double xi, double omega, double t) {
    const double w = omega * t;
    SpectatorTerms out;
    if (w == 0) {
        out.nu_zz = xi;
        return out;
    }
    // 1 - cos w written as 2 sin^2(w/2) to avoid cancellation at small w.
    double s = std::sin(w / 2);
    out.nu_yz = xi * 2 * s * s / w;
    out.nu_zz = xi * std::sin(w) / w;
    return out;
}

CMatrix spectator_unitary(double xi, double omega, const SpectatorExtras &extras, double t) {
    CMatrix even = xi / 2 * pauli_matrix("ZZ") + extras.nu_iz / 2 * pauli_matrix("IZ") +
                   extras.nu_zi / 2 * pauli_matrix("ZI");
    CMatrix drive = omega / 2 * pauli_matrix("XI");
    return mat_exp(even - drive, t) * mat_exp(even + drive, t);
}

PauliDecomposition spectator_numeric(double xi, double omega, const SpectatorExtras &extras, double t) {
    if (!(t > 0)) {
        throw InvalidInput("spectator pulse duration must be positive");
    }
    return generating_hamiltonian(spectator_unitary(xi, omega, extras, t), t);
}

SpectatorTerms spectator_numeric_terms(double xi, double omega, double t, const SpectatorExtras &extras) {
    PauliDecomposition h = spectator_numeric(xi, omega, extras, t);
    return {2 * h["YZ"].real(), 2 * h["ZZ"].real()};
}

std::vector<SpectatorSweepRow> spectator_sweep(double xi, const std::vector<double> &omegas, double t,
                                               const SpectatorExtras &extras) {
    std::vector<SpectatorSweepRow> rows;
    rows.reserve(omegas.size());
    for (double w : omegas) {
        rows.push_back({w, rotary_suppression(xi, w, t), spectator_numeric_terms(xi, w, t, extras)});
    }
    return rows;
}

}  // namespace rotecho
