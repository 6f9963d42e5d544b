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

#include <numbers>

#include "gtest/gtest.h"
#include "rotecho/errors.h"
#include "test_util.h"

using namespace rotecho;
using rotecho_test::test_rng;

TEST(pauli, label_validation) {
    EXPECT_THROW(PauliLabel(""), InvalidInput);
    EXPECT_THROW(PauliLabel("IXYZ"), InvalidInput);
    EXPECT_THROW(PauliLabel("zx"), InvalidInput);
    EXPECT_THROW(PauliLabel("ZA"), InvalidInput);
    PauliLabel p("IYZ");
    ASSERT_EQ(p.num_qubits(), 3u);
    ASSERT_EQ(PauliLabel::from_index(p.index(), 3), p);
    ASSERT_TRUE(PauliLabel("II").is_identity());
    ASSERT_LT(PauliLabel("IX"), PauliLabel("ZX"));
}

TEST(pauli, matrix_identity_case) {
    ASSERT_TRUE(pauli_matrix("I").isApprox(CMatrix::Identity(2, 2)));
}

TEST(pauli, zx_matrix) {
    CMatrix zx = pauli_matrix("ZX");
    CMatrix expected(4, 4);
    expected << 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, -1, 0;
    ASSERT_EQ(zx, expected);
    ASSERT_NEAR(std::abs(zx.trace()), 0.0, 1e-15);
    ASSERT_TRUE((zx * zx).isApprox(CMatrix::Identity(4, 4)));
}

TEST(pauli, every_label_squares_to_identity) {
    for (std::size_t n = 1; n <= 3; n++) {
        for (std::size_t k = 0; k < (std::size_t{1} << (2 * n)); k++) {
            PauliLabel p = PauliLabel::from_index(k, n);
            CMatrix m = pauli_matrix(p);
            ASSERT_TRUE(is_hermitian(m));
            ASSERT_TRUE(is_unitary(m));
            ASSERT_LT((m * m - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff(), 1e-15) << p.str();
            if (!p.is_identity()) {
                ASSERT_LT(std::abs(m.trace()), 1e-15) << p.str();
            }
        }
    }
}

TEST(pauli, decompose_single_label_round_trip) {
    PauliDecomposition d = decompose(pauli_matrix("IYZ"));
    for (const auto &[label, c] : d.terms()) {
        ASSERT_NEAR(std::abs(c - (label.str() == "IYZ" ? cdouble(1) : cdouble(0))), 0.0, 1e-15) << label.str();
    }
}

TEST(pauli, decompose_identity) {
    PauliDecomposition d = decompose(CMatrix::Identity(4, 4));
    ASSERT_NEAR(std::abs(d["II"] - 1.0), 0, 1e-15);
    ASSERT_NEAR(d.norm_squared(), 1.0, 1e-15);
}

TEST(pauli, decompose_zx_rotation) {
    CMatrix u = std::cos(std::numbers::pi / 4) * CMatrix::Identity(4, 4) -
                cdouble(0, 1) * std::sin(std::numbers::pi / 4) * pauli_matrix("ZX");
    PauliDecomposition d = decompose(u);
    ASSERT_NEAR(std::abs(d["II"] - std::sqrt(0.5)), 0, 1e-15);
    ASSERT_NEAR(std::abs(d["ZX"] - cdouble(0, -std::sqrt(0.5))), 0, 1e-15);
}

TEST(pauli, decompose_rejects_bad_dimension) {
    EXPECT_THROW(decompose(CMatrix::Identity(3, 3)), InvalidInput);
    EXPECT_THROW(decompose(CMatrix::Identity(16, 16)), InvalidInput);
    EXPECT_THROW(decompose(CMatrix::Identity(2, 4)), InvalidInput);
}

TEST(pauli, decompose_recompose_random) {
    auto &rng = test_rng();
    for (int k = 0; k < 100; k++) {
        CMatrix m = rotecho_test::random_complex(4, rng);
        ASSERT_LT(rotecho_test::max_abs_diff(recompose(decompose(m)), m), 1e-12);
    }
    CMatrix m8 = rotecho_test::random_complex(8, rng);
    ASSERT_LT(rotecho_test::max_abs_diff(recompose(decompose(m8)), m8), 1e-12);
}

TEST(pauli, parseval_for_random_unitaries) {
    auto &rng = test_rng();
    for (int k = 0; k < 100; k++) {
        int dim = 2 << (k % 3);
        PauliDecomposition d = decompose(rotecho_test::random_unitary(dim, rng));
        ASSERT_NEAR(d.norm_squared(), 1.0, 1e-12);
    }
}

TEST(pauli, mat_exp_zero) {
    ASSERT_TRUE(mat_exp(CMatrix::Zero(4, 4), 3.0).isApprox(CMatrix::Identity(4, 4)));
}

TEST(pauli, mat_exp_single_pauli) {
    double nu = 2.5e6;
    double t = std::numbers::pi / 2 / nu;
    PauliDecomposition d = decompose(mat_exp(nu / 2 * pauli_matrix("ZX"), t));
    ASSERT_NEAR(std::abs(d["II"] - std::sqrt(0.5)), 0, 1e-12);
    ASSERT_NEAR(std::abs(d["ZX"] - cdouble(0, -std::sqrt(0.5))), 0, 1e-12);
}

TEST(pauli, mat_exp_matches_taylor_oracle) {
    auto &rng = test_rng();
    for (int k = 0; k < 50; k++) {
        int dim = 2 << (k % 3);
        CMatrix h = rotecho_test::random_hermitian(dim, rng);
        double t = 0.1 + 0.05 * k;
        CMatrix u = mat_exp(h, t);
        ASSERT_TRUE(is_unitary(u));
        ASSERT_LT(rotecho_test::max_abs_diff(u, rotecho_test::taylor_exp(h, t)), 1e-10);
    }
}

TEST(pauli, mat_exp_rejects_non_hermitian) {
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 1) = 1;
    EXPECT_THROW(mat_exp(h, 1.0), InvalidInput);
}

TEST(pauli, generating_hamiltonian_identity) {
    PauliDecomposition d = generating_hamiltonian(CMatrix::Identity(4, 4), 1e-7);
    ASSERT_NEAR(d.norm_squared(), 0.0, 1e-24);
}

TEST(pauli, generating_hamiltonian_zx_quarter_turn) {
    double tau = 206.22e-9;
    CMatrix u = mat_exp(std::numbers::pi / 4 * pauli_matrix("ZX"), 1.0);
    PauliDecomposition d = generating_hamiltonian(u, tau);
    for (const auto &[label, c] : d.terms()) {
        double expected = label.str() == "ZX" ? std::numbers::pi / (8 * tau) : 0.0;
        ASSERT_NEAR(c.real(), expected, 1e-9 * std::numbers::pi / (8 * tau)) << label.str();
        ASSERT_EQ(c.imag(), 0.0);
    }
}

TEST(pauli, generating_hamiltonian_round_trip) {
    auto &rng = test_rng();
    double t = 1e-7;
    for (int k = 0; k < 100; k++) {
        int dim = 2 << (k % 3);
        CMatrix h = rotecho_test::random_hermitian(dim, rng);
        // Keep the spectrum inside the principal branch.
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        double spread = es.eigenvalues().cwiseAbs().maxCoeff();
        h *= (0.9 * std::numbers::pi / (2 * t)) / spread * (0.2 + 0.8 * ((k * 7) % 10) / 10.0);
        PauliDecomposition got = generating_hamiltonian(mat_exp(h, 2 * t), t);
        PauliDecomposition want = decompose(h);
        double scale = std::sqrt(want.norm_squared());
        for (const auto &[label, c] : want.terms()) {
            ASSERT_NEAR(got[label].real(), c.real(), 1e-9 * scale) << label.str();
        }
        ASSERT_LT(rotecho_test::max_abs_diff(mat_exp(recompose(got), 2 * t), mat_exp(h, 2 * t)), 1e-9);
    }
}

TEST(pauli, branch_cut_reports_eigenphase) {
    CMatrix u = -CMatrix::Identity(2, 2);
    try {
        generating_hamiltonian(u, 1.0);
        FAIL() << "expected BranchAmbiguity";
    } catch (const BranchAmbiguity &e) {
        ASSERT_NEAR(std::abs(e.eigenphase()), std::numbers::pi, 1e-12);
    }
}

TEST(pauli, principal_log_rejects_non_unitary) {
    EXPECT_THROW(principal_log(2.0 * CMatrix::Identity(2, 2)), InvalidInput);
}
