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


#include "rotecho/qv.h"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rotecho/errors.h"

namespace rotecho {

namespace {

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

// Uniform in (0, 1].
double unit_open(std::mt19937_64 &rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64 &rng) {
    const double r = std::sqrt(-2 * std::log(unit_open(rng)));
    return r * std::cos(2 * std::numbers::pi * unit_open(rng));
}

std::uint64_t bounded(std::mt19937_64 &rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

CMatrix haar(std::mt19937_64 &rng, Eigen::Index dim) {
    CMatrix z(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double re = standard_normal(rng);
            const double im = standard_normal(rng);
            z(i, j) = cdouble(re, im) / std::sqrt(2.0);
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
    const CMatrix &r = qr.matrixQR();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double mag = std::abs(r(k, k));
        q.col(k) *= mag > 0 ? r(k, k) / mag : cdouble(1);
    }
    return q;
}

// Left-multiplies every column of m by g acting on qubits (a, b) of width w.
void apply_left(CMatrix &m, const CMatrix &g, int a, int b, int w) {
    const Eigen::Index sa = Eigen::Index{1} << (w - 1 - a);
    const Eigen::Index sb = Eigen::Index{1} << (w - 1 - b);
    const Eigen::Index dim = Eigen::Index{1} << w;
    Eigen::Index idx[4];
    cdouble in[4];
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
        for (Eigen::Index base = 0; base < dim; ++base) {
            if (base & (sa | sb)) {
                continue;
            }
            idx[0] = base;
            idx[1] = base | sb;
            idx[2] = base | sa;
            idx[3] = base | sa | sb;
            for (int k = 0; k < 4; ++k) {
                in[k] = m(idx[k], col);
            }
            for (int r = 0; r < 4; ++r) {
                cdouble acc = 0;
                for (int k = 0; k < 4; ++k) {
                    acc += g(r, k) * in[k];
                }
                m(idx[r], col) = acc;
            }
        }
    }
}

void conjugate(CMatrix &rho, const CMatrix &g, int a, int b, int w) {
    apply_left(rho, g, a, b, w);
    rho.adjointInPlace();
    apply_left(rho, g, a, b, w);
    rho.adjointInPlace();
}

void apply_channel(CMatrix &rho, const KrausSet &kraus, int a, int b, int w) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const CMatrix &k : kraus) {
        CMatrix term = rho;
        conjugate(term, k, a, b, w);
        out += term;
    }
    rho = std::move(out);
}

void check_circuit(const QvCircuit &c) {
    if (c.width < 2 || c.width > kQvMaxWidth) {
        throw InvalidInput("QV circuit width out of range");
    }
    for (const QvLayer &layer : c.layers) {
        for (const QvBlock &blk : layer.blocks) {
            if (blk.u.rows() != 4 || blk.u.cols() != 4 || blk.first == blk.second || blk.first < 0 ||
                blk.second < 0 || blk.first >= c.width || blk.second >= c.width) {
                throw InvalidInput("QV block malformed");
            }
        }
    }
}

void check_block_operator(const CMatrix &m, const char *what) {
    if (m.rows() != 4 || m.cols() != 4) {
        throw InvalidInput(std::string(what) + " must act on two qubits");
    }
}

}  // namespace

CMatrix haar_unitary(std::uint64_t seed, Eigen::Index dim) {
    if (dim < 1) {
        throw InvalidInput("haar_unitary: dimension must be positive");
    }
    auto rng = derived_rng(seed, 0);
    return haar(rng, dim);
}

QvCircuit generate_circuit(int width, std::uint64_t seed) {
    if (width > kQvMaxWidth) {
        throw OutOfScope("QV width above 5 is out of scope");
    }
    if (width < 2) {
        throw InvalidInput("QV width must be at least 2");
    }
    auto rng = derived_rng(seed, 0);
    QvCircuit c;
    c.width = width;
    c.seed = seed;
    for (int d = 0; d < width; ++d) {
        QvLayer layer;
        layer.permutation.resize(width);
        for (int q = 0; q < width; ++q) {
            layer.permutation[q] = q;
        }
        for (int i = width - 1; i > 0; --i) {
            std::swap(layer.permutation[i], layer.permutation[bounded(rng, i + 1)]);
        }
        for (int k = 0; k + 1 < width; k += 2) {
            layer.blocks.push_back({layer.permutation[k], layer.permutation[k + 1], haar(rng, 4)});
        }
        c.layers.push_back(std::move(layer));
    }
    return c;
}

std::vector<QvCircuit> generate_circuits(int width, int count, std::uint64_t seed) {
    if (count < 0) {
        throw InvalidInput("circuit count must be non-negative");
    }
    std::vector<QvCircuit> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        auto rng = derived_rng(seed, static_cast<std::uint64_t>(i) + 1);
        out.push_back(generate_circuit(width, rng()));
    }
    return out;
}

CMatrix circuit_unitary(const QvCircuit &c) {
    check_circuit(c);
    const Eigen::Index dim = Eigen::Index{1} << c.width;
    CMatrix u = CMatrix::Identity(dim, dim);
    for (const QvLayer &layer : c.layers) {
        for (const QvBlock &blk : layer.blocks) {
            apply_left(u, blk.u, blk.first, blk.second, c.width);
        }
    }
    return u;
}

std::vector<double> ideal_probabilities(const QvCircuit &c) {
    return noisy_probabilities(c, QvNoise{});
}

std::vector<std::uint32_t> heavy_set(const std::vector<double> &p) {
    if (p.empty()) {
        return {};
    }
    std::vector<double> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
    std::vector<std::uint32_t> out;
    for (std::size_t x = 0; x < n; ++x) {
        if (p[x] > median) {
            out.push_back(static_cast<std::uint32_t>(x));
        }
    }
    return out;
}

std::vector<std::uint32_t> heavy_set(const QvCircuit &c) {
    return heavy_set(ideal_probabilities(c));
}

QvNoise qv_coherent_error(const PauliLabel &label, double angle) {
    if (label.num_qubits() != 2) {
        throw InvalidInput("QV coherent error label must be two-qubit");
    }
    return {mat_exp(pauli_matrix(label) / 2, angle), {}};
}

QvNoise qv_ptm_noise(const PTMatrix &r) {
    if (r.num_qubits() != 2) {
        throw InvalidInput("QV block noise must be a two-qubit channel");
    }
    if (!r.trace_preserving()) {
        throw InvalidInput("QV block noise must be trace preserving");
    }
    return {CMatrix(), kraus_from_ptm(r)};
}

QvNoise qv_damping_noise(const NoiseParams &noise, double t) {
    if (noise.qubits.size() != 2) {
        throw InvalidInput("QV damping noise needs exactly two qubits");
    }
    return qv_ptm_noise(damping_ptm(noise, t));
}

QvNoise combine(const QvNoise &coherent, const QvNoise &channel) {
    if (!coherent.kraus.empty() || channel.coherent.size() != 0) {
        throw InvalidInput("combine expects a coherent part and a channel part");
    }
    return {coherent.coherent, channel.kraus};
}

std::vector<double> noisy_probabilities(const QvCircuit &c, const QvNoise &noise) {
    check_circuit(c);
    if (noise.coherent.size() != 0) {
        check_block_operator(noise.coherent, "coherent error");
    }
    for (const CMatrix &k : noise.kraus) {
        check_block_operator(k, "Kraus operator");
    }
    const Eigen::Index dim = Eigen::Index{1} << c.width;
    std::vector<double> p(dim);
    if (noise.kraus.empty()) {
        CMatrix psi = CMatrix::Zero(dim, 1);
        psi(0, 0) = 1;
        for (const QvLayer &layer : c.layers) {
            for (const QvBlock &blk : layer.blocks) {
                apply_left(psi, blk.u, blk.first, blk.second, c.width);
                if (noise.coherent.size() != 0) {
                    apply_left(psi, noise.coherent, blk.first, blk.second, c.width);
                }
            }
        }
        for (Eigen::Index x = 0; x < dim; ++x) {
            p[x] = std::norm(psi(x, 0));
        }
        return p;
    }
    CMatrix rho = CMatrix::Zero(dim, dim);
    rho(0, 0) = 1;
    for (const QvLayer &layer : c.layers) {
        for (const QvBlock &blk : layer.blocks) {
            CMatrix g = noise.coherent.size() != 0 ? CMatrix(noise.coherent * blk.u) : blk.u;
            conjugate(rho, g, blk.first, blk.second, c.width);
            apply_channel(rho, noise.kraus, blk.first, blk.second, c.width);
        }
    }
    for (Eigen::Index x = 0; x < dim; ++x) {
        p[x] = std::max(0.0, rho(x, x).real());
    }
    return p;
}

HopResult hop_estimate(const std::vector<QvCircuit> &circuits, const QvNoise &noise, int shots,
                       std::uint64_t seed) {
    if (circuits.empty()) {
        throw InvalidInput("hop_estimate needs at least one circuit");
    }
    if (shots < 0) {
        throw InvalidInput("shots must be non-negative");
    }
    HopResult out;
    out.n_circuits = static_cast<int>(circuits.size());
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        const QvCircuit &c = circuits[i];
        const std::vector<std::uint32_t> heavy = heavy_set(c);
        const std::vector<double> p = noise.noiseless() ? ideal_probabilities(c) : noisy_probabilities(c, noise);
        std::vector<char> is_heavy(p.size(), 0);
        for (std::uint32_t x : heavy) {
            is_heavy[x] = 1;
        }
        double hop = 0;
        if (shots == 0) {
            for (std::size_t x = 0; x < p.size(); ++x) {
                hop += is_heavy[x] ? p[x] : 0.0;
            }
        } else {
            std::vector<double> cdf(p.size());
            double acc = 0;
            for (std::size_t x = 0; x < p.size(); ++x) {
                acc += p[x];
                cdf[x] = acc;
            }
            auto rng = derived_rng(seed, i);
            int hits = 0;
            for (int s = 0; s < shots; ++s) {
                const double r = (unit_open(rng) - 0x1.0p-53) * acc;
                auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
                std::size_t x = std::min<std::size_t>(it - cdf.begin(), p.size() - 1);
                hits += is_heavy[x];
            }
            hop = static_cast<double>(hits) / shots;
        }
        out.per_circuit.push_back(hop);
        out.mean_hop += hop;
    }
    out.mean_hop /= out.n_circuits;
    out.sigma = std::sqrt(std::max(0.0, out.mean_hop * (1 - out.mean_hop)) / out.n_circuits);
    out.passed = out.mean_hop - 2 * out.sigma > kHopThreshold;
    return out;
}

}  // namespace rotecho
