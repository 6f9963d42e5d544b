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

#ifndef ROTECHO_PAULI_H
#define ROTECHO_PAULI_H

#include <Eigen/Dense>
#include <compare>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace rotecho {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Numerical tolerances shared by every module.
namespace tol {
/// Unitarity / Hermiticity predicates and exact algebraic identities.
inline constexpr double kAlgebraic = 1e-10;
/// exp/log round trips.
inline constexpr double kRoundTrip = 1e-9;
/// Guard band (rad) around the -1 branch cut of the principal logarithm.
inline constexpr double kBranch = 1e-6;
}  // namespace tol

inline constexpr std::size_t kMaxPauliQubits = 3;

/// An n-qubit Pauli string such as "ZX" or "IYZ".
///
/// The leftmost letter acts on the most significant tensor factor. For the
/// two-qubit gate that is (control, target); for three qubits it is
/// (control, target, target spectator).
class PauliLabel {
   public:
    explicit PauliLabel(std::string_view letters);

    static PauliLabel identity(std::size_t num_qubits);
    /// Inverse of index(): base-4 digits with I=0, X=1, Y=2, Z=3.
    static PauliLabel from_index(std::size_t index, std::size_t num_qubits);

    std::size_t num_qubits() const {
        return letters_.size();
    }
    std::size_t index() const;
    char operator[](std::size_t k) const {
        return letters_[k];
    }
    const std::string &str() const {
        return letters_;
    }
    bool is_identity() const;

    auto operator<=>(const PauliLabel &) const = default;

   private:
    std::string letters_;
};

/// Coefficients c_P of M = sum_P c_P P.
class PauliDecomposition {
   public:
    explicit PauliDecomposition(std::size_t num_qubits);

    std::size_t num_qubits() const {
        return num_qubits_;
    }
    /// Zero when the label was never set.
    cdouble operator[](const PauliLabel &label) const;
    cdouble operator[](std::string_view label) const {
        return (*this)[PauliLabel(label)];
    }
    void set(const PauliLabel &label, cdouble value);
    void set(std::string_view label, cdouble value) {
        set(PauliLabel(label), value);
    }
    const std::map<PauliLabel, cdouble> &terms() const {
        return coeffs_;
    }

    double norm_squared() const;
    double max_imag() const;

   private:
    std::size_t num_qubits_;
    std::map<PauliLabel, cdouble> coeffs_;
};

CMatrix pauli_matrix(const PauliLabel &label);
inline CMatrix pauli_matrix(std::string_view label) {
    return pauli_matrix(PauliLabel(label));
}

/// c_P = tr(M P) / 2^n for every P. Throws InvalidInput unless M is square of
/// dimension 2, 4 or 8.
PauliDecomposition decompose(const CMatrix &m);
CMatrix recompose(const PauliDecomposition &d);

/// e^{-iHt}. H must be Hermitian.
CMatrix mat_exp(const CMatrix &h, double t);

/// Principal logarithm of a unitary, eigenphases in (-pi, pi].
/// Throws BranchAmbiguity when an eigenphase lies within tol::kBranch of pi.
CMatrix principal_log(const CMatrix &u);

/// H = i log(U) / (2t), returned as real Pauli coefficients (H = sum_P c_P P).
/// Here t is the duration of one echo half, so U = exp(-i H 2t).
PauliDecomposition generating_hamiltonian(const CMatrix &u, double t);

bool is_unitary(const CMatrix &m, double tolerance = tol::kAlgebraic);
bool is_hermitian(const CMatrix &m, double tolerance = tol::kAlgebraic);

CMatrix kron(const CMatrix &a, const CMatrix &b);

/// log2 of a power-of-two dimension; throws InvalidInput otherwise.
std::size_t qubits_for_dim(Eigen::Index dim);

}  // namespace rotecho

#endif
