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

#include "rotecho/pauli.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "rotecho/errors.h"

namespace rotecho {

namespace {

constexpr std::string_view kLetters = "IXYZ";

CMatrix single_pauli(char c) {
    CMatrix m(2, 2);
    const cdouble i(0, 1);
    switch (c) {
        case 'I':
            m << 1, 0, 0, 1;
            break;
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, -i, i, 0;
            break;
        case 'Z':
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

double scale_of(const CMatrix &m) {
    return std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

PauliLabel::PauliLabel(std::string_view letters) : letters_(letters) {
    if (letters_.empty() || letters_.size() > kMaxPauliQubits) {
        throw InvalidInput("Pauli label must have 1 to 3 letters, got '" + letters_ + "'");
    }
    for (char c : letters_) {
        if (kLetters.find(c) == std::string_view::npos) {
            throw InvalidInput("Pauli label may only contain I, X, Y, Z: '" + letters_ + "'");
        }
    }
}

PauliLabel PauliLabel::identity(std::size_t num_qubits) {
    return PauliLabel(std::string(num_qubits, 'I'));
}

PauliLabel PauliLabel::from_index(std::size_t index, std::size_t num_qubits) {
    std::string s(num_qubits, 'I');
    for (std::size_t k = num_qubits; k-- > 0;) {
        s[k] = kLetters[index % 4];
        index /= 4;
    }
    return PauliLabel(s);
}

std::size_t PauliLabel::index() const {
    std::size_t r = 0;
    for (char c : letters_) {
        r = 4 * r + kLetters.find(c);
    }
    return r;
}

bool PauliLabel::is_identity() const {
    return letters_.find_first_not_of('I') == std::string::npos;
}

PauliDecomposition::PauliDecomposition(std::size_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits == 0 || num_qubits > kMaxPauliQubits) {
        throw InvalidInput("PauliDecomposition supports 1 to 3 qubits");
    }
}

cdouble PauliDecomposition::operator[](const PauliLabel &label) const {
    auto it = coeffs_.find(label);
    return it == coeffs_.end() ? cdouble{} : it->second;
}

void PauliDecomposition::set(const PauliLabel &label, cdouble value) {
    if (label.num_qubits() != num_qubits_) {
        throw InvalidInput("label " + label.str() + " does not match a " + std::to_string(num_qubits_) +
                           "-qubit decomposition");
    }
    coeffs_[label] = value;
}

double PauliDecomposition::norm_squared() const {
    double s = 0;
    for (const auto &[_, c] : coeffs_) {
        s += std::norm(c);
    }
    return s;
}

double PauliDecomposition::max_imag() const {
    double s = 0;
    for (const auto &[_, c] : coeffs_) {
        s = std::max(s, std::abs(c.imag()));
    }
    return s;
}

CMatrix pauli_matrix(const PauliLabel &label) {
    CMatrix m = single_pauli(label[0]);
    for (std::size_t k = 1; k < label.num_qubits(); k++) {
        m = kron(m, single_pauli(label[k]));
    }
    return m;
}

std::size_t qubits_for_dim(Eigen::Index dim) {
    for (std::size_t n = 1; n <= 10; n++) {
        if (dim == (Eigen::Index{1} << n)) {
            return n;
        }
    }
    throw InvalidInput("matrix dimension " + std::to_string(dim) + " is not a power of two");
}

PauliDecomposition decompose(const CMatrix &m) {
    if (m.rows() != m.cols()) {
        throw InvalidInput("decompose: matrix must be square");
    }
    std::size_t n = qubits_for_dim(m.rows());
    if (n > kMaxPauliQubits) {
        throw InvalidInput("decompose: at most 3 qubits are supported");
    }
    PauliDecomposition d(n);
    const double norm = static_cast<double>(m.rows());
    const std::size_t count = std::size_t{1} << (2 * n);
    for (std::size_t k = 0; k < count; k++) {
        PauliLabel label = PauliLabel::from_index(k, n);
        // tr(M P) without forming the product.
        CMatrix p = pauli_matrix(label);
        cdouble tr = (m.array() * p.transpose().array()).sum();
        d.set(label, tr / norm);
    }
    return d;
}

CMatrix recompose(const PauliDecomposition &d) {
    Eigen::Index dim = Eigen::Index{1} << d.num_qubits();
    CMatrix m = CMatrix::Zero(dim, dim);
    for (const auto &[label, c] : d.terms()) {
        m += c * pauli_matrix(label);
    }
    return m;
}

bool is_unitary(const CMatrix &m, double tolerance) {
    if (m.rows() != m.cols()) {
        return false;
    }
    CMatrix e = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
    return e.cwiseAbs().maxCoeff() <= tolerance;
}

bool is_hermitian(const CMatrix &m, double tolerance) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance * scale_of(m);
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return r;
}

CMatrix mat_exp(const CMatrix &h, double t) {
    if (!is_hermitian(h)) {
        throw InvalidInput("mat_exp: generator is not Hermitian");
    }
    CMatrix sym = (h + h.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    Eigen::VectorXcd phases = (-cdouble(0, 1) * t * es.eigenvalues().cast<cdouble>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix principal_log(const CMatrix &u) {
    if (!is_unitary(u)) {
        throw InvalidInput("principal_log: matrix is not unitary");
    }
    // A unitary is normal, so its Schur form is diagonal up to rounding.
    Eigen::ComplexSchur<CMatrix> schur(u);
    const CMatrix &t = schur.matrixT();
    const CMatrix &q = schur.matrixU();
    Eigen::VectorXcd logs(t.rows());
    for (Eigen::Index k = 0; k < t.rows(); k++) {
        double phase = std::arg(t(k, k));
        if (std::numbers::pi - std::abs(phase) < tol::kBranch) {
            throw BranchAmbiguity("principal_log: eigenvalue within the branch-cut guard band (phase " +
                                      std::to_string(phase) + " rad)",
                                  phase);
        }
        logs(k) = cdouble(std::log(std::abs(t(k, k))), phase);
    }
    return q * logs.asDiagonal() * q.adjoint();
}

PauliDecomposition generating_hamiltonian(const CMatrix &u, double t) {
    if (!(t > 0)) {
        throw InvalidInput("generating_hamiltonian: duration must be positive");
    }
    CMatrix h = cdouble(0, 1) * principal_log(u) / (2.0 * t);
    PauliDecomposition raw = decompose(h);
    PauliDecomposition out(raw.num_qubits());
    for (const auto &[label, c] : raw.terms()) {
        out.set(label, c.real());
    }
    return out;
}

}  // namespace rotecho
