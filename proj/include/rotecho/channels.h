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


#ifndef ROTECHO_CHANNELS_H
#define ROTECHO_CHANNELS_H

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rotecho/noise.h"
#include "rotecho/pauli.h"

namespace rotecho {

using KrausSet = std::vector<CMatrix>;

/// Pauli transfer matrix in the normalized Pauli basis, rows and columns
/// ordered by PauliLabel::index(). Entry (0, 0) is the identity component.
struct PTMatrix {
    RMatrix r;

    PTMatrix() = default;
    explicit PTMatrix(RMatrix m);

    static PTMatrix identity(std::size_t num_qubits);

    Eigen::Index size() const {
        return r.rows();
    }
    /// Hilbert-space dimension d (r is d^2 x d^2).
    Eigen::Index dim() const;
    std::size_t num_qubits() const;
    bool trace_preserving(double tolerance = tol::kAlgebraic) const;
    /// Squared norm of the first column below the identity entry.
    double nonunital_norm2() const;
};

PTMatrix ptm_from_kraus(const KrausSet &kraus);
PTMatrix ptm_from_unitary(const CMatrix &u);
/// Canonical Kraus operators from the Choi matrix; eigenvalues below
/// tolerance (relative) are dropped, clearly negative ones throw.
KrausSet kraus_from_ptm(const PTMatrix &r, double tolerance = 1e-12);

/// R_{E o F} = R_E R_F (F acts first).
PTMatrix compose(const PTMatrix &after, const PTMatrix &before);
/// Channel on a (x) b; a occupies the leading qubits.
PTMatrix tensor(const PTMatrix &a, const PTMatrix &b);
PTMatrix tensor(const std::vector<PTMatrix> &parts);

/// Applies R to a density matrix through its Pauli vector.
CMatrix apply_ptm(const PTMatrix &r, const CMatrix &rho);

KrausSet amplitude_damping_kraus(double gamma_a);
KrausSet phase_damping_kraus(double gamma_p);

struct DampingChannels {
    KrausSet amplitude;
    KrausSet phase;
    PTMatrix amplitude_ptm;
    PTMatrix phase_ptm;
    /// Amplitude damping after phase damping (the two commute).
    PTMatrix combined;
};

/// Throws InvalidInput unless both probabilities lie in [0, 1].
DampingChannels damping_channels(double gamma_a, double gamma_p);

/// Closed-form single-qubit PTM of combined amplitude and phase damping.
PTMatrix damping_ptm(double gamma_a, double gamma_p);
/// Independent damping on each qubit for a duration t.
PTMatrix damping_ptm(const NoiseParams &noise, double t);

/// diag(1, lambda, ..., lambda).
PTMatrix depolarizing_ptm(double lambda, std::size_t num_qubits);

/// sum_{i,j>=1} R(i,j)^2 / (d^2 - 1).
double unitarity_ptm(const PTMatrix &r);

/// (1/3)(1 - ga)(3 - ga - 2 gp).
double unitarity_1q(double gamma_a, double gamma_p);

/// Independent damping on n qubits, given (gamma_a, gamma_p) per qubit.
double unitarity_independent(const std::vector<std::pair<double, double>> &gammas);

/// Two qubits with identical damping parameters.
double unitarity_2q_equal(double gamma_a, double gamma_p);

/// Two qubits with separate parameters, expanded polynomial form.
double unitarity_2q_expanded(double gamma_a1, double gamma_p1, double gamma_a2, double gamma_p2);

struct SubsystemUnitarity {
    std::size_t dim = 2;
    double u = 1;
    /// |t|^2 of the subsystem's non-unital column; zero for unital noise.
    double nonunital_norm2 = 0;
};

/// Unitarity of the product channel built from the subsystem values.
double product_unitarity(const std::vector<SubsystemUnitarity> &parts);

/// Unital case: (prod (1 + (d_j^2 - 1) u_j) - 1) / (d^2 - 1).
double product_unitarity_unital(const std::vector<double> &us, const std::vector<std::size_t> &dims);

/// Control+target (d = 4) and spectator (d = 2) with T1 decay probabilities per qubit.
double product_unitarity_cts(double u_ct, double u_s, double gamma_a_c, double gamma_a_t, double gamma_a_s);

/// Channel seen by one block of consecutive qubits when the rest start maximally mixed:
/// R_k(i, j) = R(.. 0 i 0 .., .. 0 j 0 ..).
PTMatrix reduced_ptm(const PTMatrix &r, const std::vector<std::size_t> &block_qubits, std::size_t block);

struct UnitarityReport {
    double u_full = 1;
    std::vector<double> u_sub;
    double u_product = 1;
    /// u_full - u_product; positive when the noise correlates the blocks.
    double e_entanglement = 0;
};

/// block_qubits partitions the register into consecutive blocks, e.g. {2, 1} for C-T-S.
UnitarityReport unitarity_report(const PTMatrix &r, const std::vector<std::size_t> &block_qubits);

// ---------------------------------------------------------------- purity RB

/// Clifford as a signed permutation of the non-identity Pauli components.
struct SignedPermutation {
    std::vector<std::uint16_t> target;
    std::vector<std::int8_t> sign;

    /// b' = C b on the non-identity components.
    void apply(const double *in, double *out) const;
    RMatrix to_matrix() const;
};

class CliffordGroup {
   public:
    /// Full group on one or two qubits (24 or 11520 elements).
    static const CliffordGroup &get(std::size_t num_qubits);

    std::size_t num_qubits() const {
        return num_qubits_;
    }
    std::size_t size() const {
        return elements_.size();
    }
    const SignedPermutation &operator[](std::size_t k) const {
        return elements_[k];
    }

   private:
    explicit CliffordGroup(std::size_t num_qubits);
    std::size_t num_qubits_;
    std::vector<SignedPermutation> elements_;
};

/// Signed-permutation form of a Clifford unitary; throws InvalidInput otherwise.
SignedPermutation clifford_action(const CMatrix &u);

struct PurityRbConfig {
    std::vector<int> lengths;
    int n_sequences = 200;
    std::uint64_t seed = 1;
    /// Binomial estimation of each Pauli expectation when set.
    std::optional<int> shots;
};

struct RbDecayFit {
    double a_offset = 0;
    double b_scale = 0;
    double u_hat = 1;
    double residual = 0;
    /// Flat data accepted as u = 1.
    bool degenerate = false;
    std::vector<int> lengths;
    std::vector<double> mean_purity;
    std::vector<double> std_purity;
};

/// Fits P(m) = A + B u^(m - 1). Flat data returns u = 1 with degenerate set;
/// non-decaying data throws FitDegenerate.
RbDecayFit fit_purity_decay(const std::vector<int> &lengths, const std::vector<double> &purity);

/// Sequences of uniformly random Cliffords, each followed by the noise channel.
RbDecayFit purity_rb(const PTMatrix &noise, const PurityRbConfig &config);

// ---------------------------------------------------------- entangling power

/// Partial-trace form: 1 - purity of the (1, 1') marginal of the state of U.
double unitary_entanglement_reduced(const CMatrix &u, Eigen::Index d1, Eigen::Index d2);

/// Permutation form: 1 - tr(U^dag(x)2 T13 U(x)2 T13) / (d1 d2)^2.
double unitary_entanglement(const CMatrix &u, Eigen::Index d1, Eigen::Index d2);

/// E(U) of exp(-i t (nu_yz YZ + nu_zz ZZ) / 2) on target (x) spectator.
double entanglement_from_heat(double nu_yz, double nu_zz, double t);

}  // namespace rotecho

#endif
