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


#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "rotecho/errors.h"
#include "rotecho/qv.h"
#include "test_util.h"

using namespace rotecho;
using rotecho_test::test_kron;

namespace {

// Permutation matrix sending basis state x to the state whose bits are
// rearranged so that qubit order[k] lands in position k.
CMatrix qubit_permutation(const std::vector<int> &order) {
    const int w = static_cast<int>(order.size());
    const int dim = 1 << w;
    CMatrix p = CMatrix::Zero(dim, dim);
    for (int x = 0; x < dim; x++) {
        int y = 0;
        for (int k = 0; k < w; k++) {
            int bit = (x >> (w - 1 - order[k])) & 1;
            y |= bit << (w - 1 - k);
        }
        p(y, x) = 1;
    }
    return p;
}

CMatrix oracle_unitary(const QvCircuit &c) {
    const int dim = 1 << c.width;
    CMatrix u = CMatrix::Identity(dim, dim);
    for (const auto &layer : c.layers) {
        for (const auto &blk : layer.blocks) {
            std::vector<int> order{blk.first, blk.second};
            for (int q = 0; q < c.width; q++) {
                if (q != blk.first && q != blk.second) {
                    order.push_back(q);
                }
            }
            CMatrix p = qubit_permutation(order);
            CMatrix g = test_kron(blk.u, CMatrix::Identity(dim / 4, dim / 4));
            u = p.transpose() * g * p * u;
        }
    }
    return u;
}

std::vector<std::uint32_t> oracle_heavy(const std::vector<double> &p) {
    std::vector<std::pair<double, std::uint32_t>> sorted;
    for (std::uint32_t x = 0; x < p.size(); x++) {
        sorted.push_back({p[x], x});
    }
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = (sorted[n / 2 - 1].first + sorted[n / 2].first) / 2;
    std::vector<std::uint32_t> out;
    for (auto [prob, x] : sorted) {
        if (prob > median) {
            out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct Paired {
    double mean = 0;
    double se = 0;
};

Paired paired_drop(const HopResult &a, const HopResult &b) {
    const int n = a.n_circuits;
    Paired out;
    for (int i = 0; i < n; i++) {
        out.mean += a.per_circuit[i] - b.per_circuit[i];
    }
    out.mean /= n;
    double ss = 0;
    for (int i = 0; i < n; i++) {
        double d = a.per_circuit[i] - b.per_circuit[i] - out.mean;
        ss += d * d;
    }
    out.se = std::sqrt(ss / (n - 1) / n);
    return out;
}

}  // namespace

TEST(QvCircuit, DeterministicFromSeed) {
    QvCircuit a = generate_circuit(2, 7), b = generate_circuit(2, 7), c = generate_circuit(2, 8);
    ASSERT_EQ(a.layers.size(), b.layers.size());
    for (std::size_t d = 0; d < a.layers.size(); d++) {
        EXPECT_EQ(a.layers[d].permutation, b.layers[d].permutation);
        EXPECT_EQ(a.layers[d].blocks[0].u, b.layers[d].blocks[0].u);
    }
    EXPECT_GT((a.layers[0].blocks[0].u - c.layers[0].blocks[0].u).norm(), 0.1);
    auto set1 = generate_circuits(3, 4, 9), set2 = generate_circuits(3, 4, 9);
    for (int i = 0; i < 4; i++) {
        EXPECT_EQ(circuit_unitary(set1[i]), circuit_unitary(set2[i]));
    }
    EXPECT_NE(set1[0].seed, set1[1].seed);
}

TEST(QvCircuit, Structure) {
    for (int w = 2; w <= 5; w++) {
        QvCircuit c = generate_circuit(w, 3);
        EXPECT_EQ(c.width, w);
        ASSERT_EQ(static_cast<int>(c.layers.size()), w);
        for (const auto &layer : c.layers) {
            std::vector<int> perm = layer.permutation;
            std::sort(perm.begin(), perm.end());
            for (int q = 0; q < w; q++) {
                EXPECT_EQ(perm[q], q);
            }
            ASSERT_EQ(static_cast<int>(layer.blocks.size()), w / 2);
            for (std::size_t k = 0; k < layer.blocks.size(); k++) {
                EXPECT_EQ(layer.blocks[k].first, layer.permutation[2 * k]);
                EXPECT_EQ(layer.blocks[k].second, layer.permutation[2 * k + 1]);
                EXPECT_TRUE(is_unitary(layer.blocks[k].u, 1e-12));
            }
        }
    }
}

TEST(QvCircuit, WidthLimits) {
    EXPECT_THROW(generate_circuit(6, 1), OutOfScope);
    EXPECT_THROW(generate_circuit(1, 1), InvalidInput);
    EXPECT_THROW(generate_circuits(3, -1, 1), InvalidInput);
}

TEST(QvCircuit, PermutationsUniform) {
    // All 6 orderings of width 3 appear with roughly equal frequency.
    std::vector<int> counts(6, 0);
    for (int s = 0; s < 1200; s++) {
        auto p = generate_circuit(3, s).layers[0].permutation;
        counts[p[0] * 2 + (p[1] > p[2] ? 1 : 0)]++;
    }
    for (int c : counts) {
        EXPECT_NEAR(c, 200, 5 * std::sqrt(200.0));
    }
}

TEST(QvCircuit, HaarMoments) {
    // E|U_00|^2 = 1/4 and E|U_00|^4 = 2/(4*5) for Haar on U(4).
    double m2 = 0, m4 = 0;
    const int n = 4000;
    for (int s = 0; s < n; s++) {
        double a = std::norm(haar_unitary(s)(0, 0));
        m2 += a;
        m4 += a * a;
    }
    EXPECT_NEAR(m2 / n, 0.25, 0.01);
    EXPECT_NEAR(m4 / n, 0.1, 0.006);
}

TEST(QvCircuit, UnitaryMatchesOracle) {
    for (int w = 2; w <= 5; w++) {
        QvCircuit c = generate_circuit(w, 100 + w);
        EXPECT_LT((circuit_unitary(c) - oracle_unitary(c)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(HeavySet, MatchesExhaustiveEnumeration) {
    for (int w = 2; w <= 4; w++) {
        for (int s = 0; s < 20; s++) {
            QvCircuit c = generate_circuit(w, 1000 * w + s);
            CMatrix u = oracle_unitary(c);
            std::vector<double> p(1 << w);
            for (int x = 0; x < (1 << w); x++) {
                p[x] = std::norm(u(x, 0));
            }
            EXPECT_EQ(heavy_set(c), oracle_heavy(p));
            std::vector<std::uint32_t> heavy = heavy_set(c);
            std::vector<char> mark(p.size(), 0);
            for (auto x : heavy) {
                mark[x] = 1;
            }
            std::size_t light = std::count(mark.begin(), mark.end(), 0);
            EXPECT_EQ(heavy.size() + light, p.size());
            EXPECT_EQ(heavy.size(), p.size() / 2);
        }
    }
}

TEST(HeavySet, DeltaDistribution) {
    QvCircuit c = generate_circuit(2, 1);
    for (auto &layer : c.layers) {
        for (auto &blk : layer.blocks) {
            blk.u = CMatrix::Identity(4, 4);
        }
    }
    EXPECT_EQ(heavy_set(c), std::vector<std::uint32_t>{0});
    EXPECT_TRUE(heavy_set(std::vector<double>(4, 0.25)).empty());
}

TEST(HeavySet, IdealMassAtLeastHalf) {
    for (auto &c : generate_circuits(4, 200, 5)) {
        auto p = ideal_probabilities(c);
        double mass = 0;
        for (auto x : heavy_set(p)) {
            mass += p[x];
        }
        EXPECT_GE(mass, 0.5);
    }
}

TEST(Hop, NoiselessEqualsIdealMassAndPasses) {
    for (int w = 2; w <= 4; w++) {
        auto circuits = generate_circuits(w, 100, 17);
        HopResult r = hop_estimate(circuits, QvNoise{});
        EXPECT_EQ(r.n_circuits, 100);
        for (int i = 0; i < 100; i++) {
            auto p = ideal_probabilities(circuits[i]);
            double mass = 0;
            for (auto x : heavy_set(p)) {
                mass += p[x];
            }
            EXPECT_NEAR(r.per_circuit[i], mass, 1e-14);
        }
        EXPECT_NEAR(r.sigma, std::sqrt(r.mean_hop * (1 - r.mean_hop) / 100), 1e-15);
        EXPECT_TRUE(r.passed) << w;
    }
}

TEST(Hop, FullDepolarizingGivesHalf) {
    auto circuits = generate_circuits(4, 30, 2);
    HopResult r = hop_estimate(circuits, qv_ptm_noise(depolarizing_ptm(0.0, 2)));
    EXPECT_NEAR(r.mean_hop, 0.5, 1e-12);
    EXPECT_FALSE(r.passed);
}

TEST(Hop, ChannelPathMatchesStatevector) {
    QvCircuit c = generate_circuit(4, 77);
    QvNoise coherent = qv_coherent_error(PauliLabel("IY"), 0.3);
    QvNoise as_channel{CMatrix(), {coherent.coherent}};
    auto a = noisy_probabilities(c, coherent), b = noisy_probabilities(c, as_channel);
    for (std::size_t x = 0; x < a.size(); x++) {
        EXPECT_NEAR(a[x], b[x], 1e-13);
    }
    QvNoise via_ptm = qv_ptm_noise(ptm_from_unitary(coherent.coherent));
    auto d = noisy_probabilities(c, via_ptm);
    for (std::size_t x = 0; x < a.size(); x++) {
        EXPECT_NEAR(a[x], d[x], 1e-12);
    }
}

TEST(Hop, CoherentErrorConvention) {
    QvNoise n = qv_coherent_error(PauliLabel("IY"), 0.1);
    CMatrix expect = std::cos(0.05) * CMatrix::Identity(4, 4) -
                     cdouble(0, std::sin(0.05)) * rotecho_test::test_pauli("IY");
    EXPECT_LT((n.coherent - expect).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(qv_coherent_error(PauliLabel("IYZ"), 0.1), InvalidInput);
}

TEST(Hop, DampingLowersHop) {
    // CPTP noise never raises HOP in expectation; paired 3 sigma over 100 circuits.
    auto circuits = generate_circuits(4, 100, 21);
    NoiseParams np{{{30e-6, 20e-6}, {40e-6, 25e-6}}};
    QvNoise damp = qv_damping_noise(np, 400e-9);
    HopResult clean = hop_estimate(circuits, QvNoise{});
    HopResult noisy = hop_estimate(circuits, damp);
    Paired drop = paired_drop(clean, noisy);
    EXPECT_GT(drop.mean, 3 * drop.se);
    for (auto &c : circuits) {
        auto p = noisy_probabilities(c, damp);
        double total = 0;
        for (double x : p) {
            total += x;
        }
        EXPECT_NEAR(total, 1, 1e-12);
    }
    QvNoise both = combine(qv_coherent_error(PauliLabel("IY"), 0.05), damp);
    EXPECT_LT(hop_estimate(circuits, both).mean_hop, clean.mean_hop);
    EXPECT_THROW(combine(damp, damp), InvalidInput);
}

TEST(Hop, CoherentIyMonotoneAtResolvableAngles) {
    // Paired steps of 0 -> 0.2 -> 0.5 rad are resolved well beyond 3 sigma.
    auto circuits = generate_circuits(4, 150, 1);
    std::vector<HopResult> rs;
    for (double a : {0.0, 0.2, 0.5}) {
        rs.push_back(hop_estimate(circuits, qv_coherent_error(PauliLabel("IY"), a)));
    }
    for (int k = 0; k < 2; k++) {
        Paired d = paired_drop(rs[k], rs[k + 1]);
        EXPECT_GT(d.mean, 3 * d.se) << k;
    }
}

TEST(Hop, ShotsModeDeterministicAndConsistent) {
    auto circuits = generate_circuits(3, 40, 4);
    HopResult exact = hop_estimate(circuits, QvNoise{});
    HopResult a = hop_estimate(circuits, QvNoise{}, 500, 8), b = hop_estimate(circuits, QvNoise{}, 500, 8);
    EXPECT_EQ(a.per_circuit, b.per_circuit);
    HopResult c = hop_estimate(circuits, QvNoise{}, 500, 9);
    EXPECT_NE(a.per_circuit, c.per_circuit);
    // Binomial spread of the pooled estimate over 40 x 500 shots.
    EXPECT_NEAR(a.mean_hop, exact.mean_hop, 4 * std::sqrt(0.25 / 20000));
}

TEST(Hop, RejectsBadInput) {
    EXPECT_THROW(hop_estimate({}, QvNoise{}), InvalidInput);
    auto circuits = generate_circuits(2, 2, 1);
    EXPECT_THROW(hop_estimate(circuits, QvNoise{}, -1), InvalidInput);
    QvNoise bad{CMatrix::Identity(8, 8), {}};
    EXPECT_THROW(noisy_probabilities(circuits[0], bad), InvalidInput);
    EXPECT_THROW(qv_ptm_noise(depolarizing_ptm(0.5, 1)), InvalidInput);
}

TEST(Hop, Width4SuiteIsFast) {
    auto start = std::chrono::steady_clock::now();
    auto circuits = generate_circuits(4, 150, 1);
    for (double a : {0.0, 0.02, 0.05}) {
        hop_estimate(circuits, qv_coherent_error(PauliLabel("IY"), a));
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 60.0);
}
