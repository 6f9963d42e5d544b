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


#ifndef ROTECHO_QV_H
#define ROTECHO_QV_H

#include <cstdint>
#include <vector>

#include "rotecho/channels.h"
#include "rotecho/noise.h"
#include "rotecho/pauli.h"

namespace rotecho {

inline constexpr int kQvMaxWidth = 5;
inline constexpr double kHopThreshold = 2.0 / 3.0;

/// Two-qubit block acting on (first, second); first is the more significant
/// factor of u.
struct QvBlock {
    int first = 0;
    int second = 1;
    CMatrix u;
};

struct QvLayer {
    std::vector<int> permutation;
    std::vector<QvBlock> blocks;
};

/// Square model circuit. Bitstrings index qubit 0 as the most significant bit.
struct QvCircuit {
    int width = 0;
    std::uint64_t seed = 0;
    std::vector<QvLayer> layers;
};

/// Haar 4x4 unitary by QR of a complex Ginibre matrix with phase-fixed R.
/// Normals come from Box-Muller on mt19937_64 output so circuits do not
/// depend on the standard library's distribution implementation.
CMatrix haar_unitary(std::uint64_t seed, Eigen::Index dim = 4);

QvCircuit generate_circuit(int width, std::uint64_t seed);
/// count circuits with per-circuit seeds derived from (seed, index).
std::vector<QvCircuit> generate_circuits(int width, int count, std::uint64_t seed);

/// Full 2^m x 2^m unitary of the circuit.
CMatrix circuit_unitary(const QvCircuit &c);
std::vector<double> ideal_probabilities(const QvCircuit &c);

/// Outcomes with ideal probability strictly above the median, ascending.
/// A delta distribution has median 0 for m >= 2 and yields the single peak.
std::vector<std::uint32_t> heavy_set(const QvCircuit &c);
std::vector<std::uint32_t> heavy_set(const std::vector<double> &probabilities);

/// Error applied after every two-qubit block: the coherent unitary first,
/// then the Kraus channel. Both act on (first, second) of the block.
struct QvNoise {
    CMatrix coherent;  // empty = none
    KrausSet kraus;    // empty = none

    bool noiseless() const {
        return coherent.size() == 0 && kraus.empty();
    }
};

/// exp(-i a IY / 2): coherent target-Y error of accumulated angle a = nu_IY t.
QvNoise qv_coherent_error(const PauliLabel &label, double angle);
QvNoise qv_ptm_noise(const PTMatrix &r);
/// Independent damping on both qubits over one block duration.
QvNoise qv_damping_noise(const NoiseParams &noise, double t);
/// Coherent part of a and channel of b (a's channel must be empty).
QvNoise combine(const QvNoise &coherent, const QvNoise &channel);

/// Output distribution of the noisy circuit (density matrix when a channel is
/// present, statevector otherwise).
std::vector<double> noisy_probabilities(const QvCircuit &c, const QvNoise &noise);

struct HopResult {
    int n_circuits = 0;
    double mean_hop = 0;
    double sigma = 0;
    bool passed = false;
    std::vector<double> per_circuit;
};

/// shots = 0 is exact-expectation mode (heavy mass of the noisy distribution).
/// sigma = sqrt(h (1 - h) / n_circuits); passed iff h - 2 sigma > 2/3.
HopResult hop_estimate(const std::vector<QvCircuit> &circuits, const QvNoise &noise, int shots = 0,
                       std::uint64_t seed = 1);

}  // namespace rotecho

#endif
