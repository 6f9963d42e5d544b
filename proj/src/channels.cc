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


#include "rotecho/channels.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <string>

#include "rotecho/errors.h"

namespace rotecho {

namespace {

std::size_t pow4(std::size_t n) {
    return std::size_t{1} << (2 * n);
}

const std::vector<CMatrix> &pauli_basis(std::size_t n) {
    static std::map<std::size_t, std::vector<CMatrix>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<CMatrix> basis;
        for (std::size_t k = 0; k < pow4(n); ++k) {
            basis.push_back(pauli_matrix(PauliLabel::from_index(k, n)));
        }
        it = cache.emplace(n, std::move(basis)).first;
    }
    return it->second;
}

void check_probability(double g, const char *name) {
    if (!(g >= 0 && g <= 1)) {
        throw InvalidInput(std::string(name) + " must lie in [0, 1]");
    }
}

template <class Map>
PTMatrix ptm_from_map(std::size_t n, const Map &channel) {
    const auto &basis = pauli_basis(n);
    const auto dd = static_cast<Eigen::Index>(basis.size());
    const double d = static_cast<double>(std::size_t{1} << n);
    RMatrix r(dd, dd);
    for (Eigen::Index j = 0; j < dd; ++j) {
        CMatrix out = channel(basis[j]);
        for (Eigen::Index i = 0; i < dd; ++i) {
            // tr(P_i M) without forming the product.
            r(i, j) = (basis[i].transpose().cwiseProduct(out)).sum().real() / d;
        }
    }
    return PTMatrix(std::move(r));
}

}  // namespace

PTMatrix::PTMatrix(RMatrix m) : r(std::move(m)) {
    if (r.rows() != r.cols()) {
        throw InvalidInput("PTM must be square");
    }
    (void)num_qubits();
}

PTMatrix PTMatrix::identity(std::size_t num_qubits) {
    auto n = static_cast<Eigen::Index>(pow4(num_qubits));
    return PTMatrix(RMatrix::Identity(n, n));
}

Eigen::Index PTMatrix::dim() const {
    return Eigen::Index{1} << num_qubits();
}

std::size_t PTMatrix::num_qubits() const {
    for (std::size_t n = 1; n <= kMaxPauliQubits; ++n) {
        if (static_cast<Eigen::Index>(pow4(n)) == r.rows()) {
            return n;
        }
    }
    throw InvalidInput("PTM size must be 4, 16 or 64");
}

bool PTMatrix::trace_preserving(double tolerance) const {
    if (std::abs(r(0, 0) - 1) > tolerance) {
        return false;
    }
    return r.row(0).tail(r.cols() - 1).cwiseAbs().maxCoeff() <= tolerance;
}

double PTMatrix::nonunital_norm2() const {
    return r.col(0).tail(r.rows() - 1).squaredNorm();
}

PTMatrix ptm_from_kraus(const KrausSet &kraus) {
    if (kraus.empty()) {
        throw InvalidInput("empty Kraus set");
    }
    const Eigen::Index d = kraus.front().rows();
    for (const auto &k : kraus) {
        if (k.rows() != d || k.cols() != d) {
            throw InvalidInput("Kraus operators must share one square shape");
        }
    }
    return ptm_from_map(qubits_for_dim(d), [&](const CMatrix &p) {
        CMatrix acc = CMatrix::Zero(d, d);
        for (const auto &k : kraus) {
            acc += k * p * k.adjoint();
        }
        return acc;
    });
}

PTMatrix ptm_from_unitary(const CMatrix &u) {
    if (!is_unitary(u)) {
        throw InvalidInput("ptm_from_unitary: matrix is not unitary");
    }
    return ptm_from_kraus({u});
}

KrausSet kraus_from_ptm(const PTMatrix &r, double tolerance) {
    const std::size_t n = r.num_qubits();
    const auto &basis = pauli_basis(n);
    const Eigen::Index d = r.dim();
    // Choi matrix sum_ij R_ij P_i (x) P_j^T / d, output index leading.
    CMatrix choi = CMatrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        for (Eigen::Index j = 0; j < r.size(); ++j) {
            if (r.r(i, j) != 0) {
                choi += r.r(i, j) * kron(basis[i], basis[j].transpose());
            }
        }
    }
    choi /= static_cast<double>(d);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(choi);
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    KrausSet out;
    for (Eigen::Index k = choi.rows() - 1; k >= 0; --k) {
        const double lambda = eig.eigenvalues()(k);
        if (lambda < -tolerance * scale) {
            throw InvalidInput("kraus_from_ptm: channel is not completely positive");
        }
        if (lambda <= tolerance * scale) {
            continue;
        }
        CMatrix kop(d, d);
        for (Eigen::Index o = 0; o < d; ++o) {
            for (Eigen::Index a = 0; a < d; ++a) {
                kop(o, a) = std::sqrt(lambda) * eig.eigenvectors()(o * d + a, k);
            }
        }
        out.push_back(std::move(kop));
    }
    return out;
}

PTMatrix compose(const PTMatrix &after, const PTMatrix &before) {
    if (after.size() != before.size()) {
        throw InvalidInput("compose: PTM sizes differ");
    }
    return PTMatrix(after.r * before.r);
}

PTMatrix tensor(const PTMatrix &a, const PTMatrix &b) {
    if (a.num_qubits() + b.num_qubits() > kMaxPauliQubits) {
        throw InvalidInput("tensor: too many qubits");
    }
    const Eigen::Index na = a.size(), nb = b.size();
    RMatrix out(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        for (Eigen::Index j = 0; j < na; ++j) {
            out.block(i * nb, j * nb, nb, nb) = a.r(i, j) * b.r;
        }
    }
    return PTMatrix(std::move(out));
}

PTMatrix tensor(const std::vector<PTMatrix> &parts) {
    if (parts.empty()) {
        throw InvalidInput("tensor: no factors");
    }
    PTMatrix out = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        out = tensor(out, parts[k]);
    }
    return out;
}

CMatrix apply_ptm(const PTMatrix &r, const CMatrix &rho) {
    const std::size_t n = r.num_qubits();
    if (rho.rows() != r.dim() || rho.cols() != r.dim()) {
        throw InvalidInput("apply_ptm: state dimension mismatch");
    }
    const auto &basis = pauli_basis(n);
    Eigen::VectorXd b(r.size());
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        b(k) = (basis[k].transpose().cwiseProduct(rho)).sum().real();
    }
    Eigen::VectorXd out = r.r * b;
    CMatrix result = CMatrix::Zero(rho.rows(), rho.cols());
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        result += out(k) * basis[k];
    }
    return result / static_cast<double>(r.dim());
}

KrausSet amplitude_damping_kraus(double gamma_a) {
    check_probability(gamma_a, "gamma_a");
    CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
    k0(0, 0) = 1;
    k0(1, 1) = std::sqrt(1 - gamma_a);
    k1(0, 1) = std::sqrt(gamma_a);
    return {k0, k1};
}

KrausSet phase_damping_kraus(double gamma_p) {
    check_probability(gamma_p, "gamma_p");
    CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
    k0(0, 0) = 1;
    k0(1, 1) = std::sqrt(1 - gamma_p);
    k1(1, 1) = std::sqrt(gamma_p);
    return {k0, k1};
}

DampingChannels damping_channels(double gamma_a, double gamma_p) {
    DampingChannels out;
    out.amplitude = amplitude_damping_kraus(gamma_a);
    out.phase = phase_damping_kraus(gamma_p);
    out.amplitude_ptm = ptm_from_kraus(out.amplitude);
    out.phase_ptm = ptm_from_kraus(out.phase);
    out.combined = compose(out.amplitude_ptm, out.phase_ptm);
    return out;
}

PTMatrix damping_ptm(double gamma_a, double gamma_p) {
    check_probability(gamma_a, "gamma_a");
    check_probability(gamma_p, "gamma_p");
    const double off = std::sqrt(1 - gamma_a) * std::sqrt(1 - gamma_p);
    RMatrix r = RMatrix::Zero(4, 4);
    r(0, 0) = 1;
    r(1, 1) = off;
    r(2, 2) = off;
    r(3, 0) = gamma_a;
    r(3, 3) = 1 - gamma_a;
    return PTMatrix(std::move(r));
}

PTMatrix damping_ptm(const NoiseParams &noise, double t) {
    if (noise.qubits.empty()) {
        throw InvalidInput("damping_ptm: no qubits");
    }
    std::vector<PTMatrix> parts;
    for (const auto &q : noise.qubits) {
        parts.push_back(damping_ptm(q.gamma_a(t), q.gamma_p(t)));
    }
    return tensor(parts);
}

PTMatrix depolarizing_ptm(double lambda, std::size_t num_qubits) {
    if (!(std::abs(lambda) <= 1)) {
        throw InvalidInput("depolarizing lambda must lie in [-1, 1]");
    }
    PTMatrix r = PTMatrix::identity(num_qubits);
    r.r.diagonal().tail(r.size() - 1).setConstant(lambda);
    return r;
}

double unitarity_ptm(const PTMatrix &r) {
    const Eigen::Index n = r.size() - 1;
    return r.r.bottomRightCorner(n, n).squaredNorm() / static_cast<double>(n);
}

double unitarity_1q(double gamma_a, double gamma_p) {
    return (1 - gamma_a) * (3 - gamma_a - 2 * gamma_p) / 3;
}

double unitarity_independent(const std::vector<std::pair<double, double>> &gammas) {
    if (gammas.empty() || gammas.size() > kMaxPauliQubits) {
        throw InvalidInput("unitarity_independent supports 1 to 3 qubits");
    }
    double full = 1, nonunital = 1;
    for (auto [ga, gp] : gammas) {
        check_probability(ga, "gamma_a");
        check_probability(gp, "gamma_p");
        full *= 1 + ga * ga + 2 * (1 - ga) * (1 - gp) + (1 - ga) * (1 - ga);
        nonunital *= 1 + ga * ga;
    }
    return (full - nonunital) / static_cast<double>(pow4(gammas.size()) - 1);
}

double unitarity_2q_equal(double ga, double gp) {
    return (ga - 1) * (ga + 2 * gp - 3) * (ga * (3 * ga + 2 * gp - 4) - 2 * gp + 5) / 15;
}

double unitarity_2q_expanded(double a1, double p1, double a2, double p2) {
    const double poly = a1 * a1 * (3 * a2 * a2 + 4 * a2 * (p2 - 2) - 4 * p2 + 7) +
                        4 * a1 * (p1 - 2) * (a2 * a2 + a2 * (p2 - 2) - p2 + 2) + a2 * a2 * (7 - 4 * p1) -
                        4 * a2 * (p1 - 2) * (p2 - 2) + 4 * p1 * p2 - 8 * p1 - 8 * p2;
    return 1 + poly / 15;
}

double product_unitarity(const std::vector<SubsystemUnitarity> &parts) {
    if (parts.empty()) {
        throw InvalidInput("product_unitarity: no subsystems");
    }
    double full = 1, nonunital = 1, d = 1;
    for (const auto &p : parts) {
        if (p.dim < 2) {
            throw InvalidInput("product_unitarity: subsystem dimension must be at least 2");
        }
        const double dk = static_cast<double>(p.dim);
        full *= 1 + p.nonunital_norm2 + (dk * dk - 1) * p.u;
        nonunital *= 1 + p.nonunital_norm2;
        d *= dk;
    }
    return (full - nonunital) / (d * d - 1);
}

double product_unitarity_unital(const std::vector<double> &us, const std::vector<std::size_t> &dims) {
    if (us.size() != dims.size()) {
        throw InvalidInput("product_unitarity_unital: size mismatch");
    }
    std::vector<SubsystemUnitarity> parts;
    for (std::size_t k = 0; k < us.size(); ++k) {
        parts.push_back({dims[k], us[k], 0.0});
    }
    return product_unitarity(parts);
}

double product_unitarity_cts(double u_ct, double u_s, double ga_c, double ga_t, double ga_s) {
    return (15 * u_ct * (1 + ga_s * ga_s) + 45 * u_ct * u_s + 3 * u_s * (1 + ga_c * ga_c) * (1 + ga_t * ga_t)) /
           63;
}

PTMatrix reduced_ptm(const PTMatrix &r, const std::vector<std::size_t> &block_qubits, std::size_t block) {
    std::size_t total = 0;
    for (auto q : block_qubits) {
        if (q == 0) {
            throw InvalidInput("reduced_ptm: empty block");
        }
        total += q;
    }
    if (total != r.num_qubits() || block >= block_qubits.size()) {
        throw InvalidInput("reduced_ptm: block layout does not match the PTM");
    }
    std::size_t after = 0;
    for (std::size_t k = block + 1; k < block_qubits.size(); ++k) {
        after += block_qubits[k];
    }
    const auto stride = static_cast<Eigen::Index>(pow4(after));
    const auto n = static_cast<Eigen::Index>(pow4(block_qubits[block]));
    RMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = r.r(i * stride, j * stride);
        }
    }
    return PTMatrix(std::move(out));
}

UnitarityReport unitarity_report(const PTMatrix &r, const std::vector<std::size_t> &block_qubits) {
    UnitarityReport rep;
    rep.u_full = unitarity_ptm(r);
    std::vector<SubsystemUnitarity> parts;
    for (std::size_t k = 0; k < block_qubits.size(); ++k) {
        PTMatrix sub = reduced_ptm(r, block_qubits, k);
        rep.u_sub.push_back(unitarity_ptm(sub));
        parts.push_back({static_cast<std::size_t>(sub.dim()), rep.u_sub.back(), sub.nonunital_norm2()});
    }
    rep.u_product = product_unitarity(parts);
    rep.e_entanglement = rep.u_full - rep.u_product;
    return rep;
}

// ---------------------------------------------------------------- purity RB

void SignedPermutation::apply(const double *in, double *out) const {
    for (std::size_t j = 0; j < target.size(); ++j) {
        out[target[j]] = sign[j] * in[j];
    }
}

RMatrix SignedPermutation::to_matrix() const {
    const auto n = static_cast<Eigen::Index>(target.size());
    RMatrix m = RMatrix::Zero(n + 1, n + 1);
    m(0, 0) = 1;
    for (Eigen::Index j = 0; j < n; ++j) {
        m(target[j] + 1, j + 1) = sign[j];
    }
    return m;
}

SignedPermutation clifford_action(const CMatrix &u) {
    PTMatrix r = ptm_from_unitary(u);
    const Eigen::Index n = r.size() - 1;
    SignedPermutation p;
    p.target.resize(n);
    p.sign.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index row = 0;
        const double v = r.r.col(j + 1).tail(n).cwiseAbs().maxCoeff(&row);
        if (std::abs(v - 1) > 1e-9) {
            throw InvalidInput("clifford_action: unitary is not a Clifford");
        }
        p.target[j] = static_cast<std::uint16_t>(row);
        p.sign[j] = r.r(row + 1, j + 1) > 0 ? 1 : -1;
    }
    return p;
}

namespace {

SignedPermutation then(const SignedPermutation &first, const SignedPermutation &second) {
    SignedPermutation out;
    out.target.resize(first.target.size());
    out.sign.resize(first.target.size());
    for (std::size_t j = 0; j < first.target.size(); ++j) {
        out.target[j] = second.target[first.target[j]];
        out.sign[j] = static_cast<std::int8_t>(first.sign[j] * second.sign[first.target[j]]);
    }
    return out;
}

std::string key_of(const SignedPermutation &p) {
    std::string key;
    for (std::size_t j = 0; j < p.target.size(); ++j) {
        key.push_back(static_cast<char>(p.target[j] * 2 + (p.sign[j] < 0)));
    }
    return key;
}

}  // namespace

CliffordGroup::CliffordGroup(std::size_t num_qubits) : num_qubits_(num_qubits) {
    const cdouble i(0, 1);
    CMatrix h(2, 2), s(2, 2), id = CMatrix::Identity(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    s << 1, 0, 0, i;
    std::vector<CMatrix> gens;
    if (num_qubits == 1) {
        gens = {h, s};
    } else if (num_qubits == 2) {
        CMatrix cnot = CMatrix::Zero(4, 4);
        cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
        gens = {kron(h, id), kron(id, h), kron(s, id), kron(id, s), cnot};
    } else {
        throw InvalidInput("Clifford groups are available for one or two qubits");
    }
    std::vector<SignedPermutation> gen_actions;
    for (const auto &g : gens) {
        gen_actions.push_back(clifford_action(g));
    }
    SignedPermutation e;
    const std::size_t n = pow4(num_qubits) - 1;
    for (std::size_t j = 0; j < n; ++j) {
        e.target.push_back(static_cast<std::uint16_t>(j));
        e.sign.push_back(1);
    }
    std::map<std::string, std::size_t> seen;
    std::deque<std::size_t> queue;
    seen.emplace(key_of(e), 0);
    elements_.push_back(e);
    queue.push_back(0);
    while (!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop_front();
        for (const auto &g : gen_actions) {
            SignedPermutation next = then(elements_[k], g);
            if (seen.emplace(key_of(next), elements_.size()).second) {
                elements_.push_back(std::move(next));
                queue.push_back(elements_.size() - 1);
            }
        }
    }
}

const CliffordGroup &CliffordGroup::get(std::size_t num_qubits) {
    if (num_qubits == 1) {
        static const CliffordGroup one(1);
        return one;
    }
    if (num_qubits == 2) {
        static const CliffordGroup two(2);
        return two;
    }
    throw InvalidInput("Clifford groups are available for one or two qubits");
}

RbDecayFit fit_purity_decay(const std::vector<int> &lengths, const std::vector<double> &purity) {
    if (lengths.size() != purity.size()) {
        throw InvalidInput("fit_purity_decay: size mismatch");
    }
    std::vector<int> distinct(lengths);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3 || distinct.front() < 1) {
        throw InvalidInput("fit_purity_decay: need at least three distinct lengths >= 1");
    }
    RbDecayFit fit;
    fit.lengths = lengths;
    fit.mean_purity = purity;
    const auto [lo, hi] = std::minmax_element(purity.begin(), purity.end());
    double mean = 0;
    for (double p : purity) {
        mean += p;
    }
    mean /= static_cast<double>(purity.size());
    if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(mean))) {
        fit.a_offset = mean;
        fit.u_hat = 1;
        fit.degenerate = true;
        return fit;
    }

    // Linear A, B for fixed u; the residual is then minimized over log(1 - u).
    struct Solve {
        double a, b, res;
    };
    auto solve = [&](double u) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(lengths.size());
        std::vector<double> x(lengths.size());
        for (std::size_t k = 0; k < lengths.size(); ++k) {
            x[k] = std::pow(u, lengths[k] - 1);
            sx += x[k];
            sy += purity[k];
            sxx += x[k] * x[k];
            sxy += x[k] * purity[k];
        }
        const double det = n * sxx - sx * sx;
        Solve s{mean, 0, 0};
        if (std::abs(det) > 1e-300) {
            s.b = (n * sxy - sx * sy) / det;
            s.a = (sy - s.b * sx) / n;
        }
        for (std::size_t k = 0; k < lengths.size(); ++k) {
            const double r = purity[k] - s.a - s.b * x[k];
            s.res += r * r;
        }
        return s;
    };
    auto u_of = [](double lq) { return 1 - std::exp(lq); };
    const double lq_min = std::log(1e-10), lq_max = std::log(1 - 1e-6);
    constexpr int kGrid = 400;
    int best = 0;
    double best_res = INFINITY;
    for (int g = 0; g <= kGrid; ++g) {
        const double lq = lq_min + (lq_max - lq_min) * g / kGrid;
        const double r = solve(u_of(lq)).res;
        if (r < best_res) {
            best_res = r;
            best = g;
        }
    }
    const double step = (lq_max - lq_min) / kGrid;
    double a = lq_min + step * std::max(best - 1, 0), b = lq_min + step * std::min(best + 1, kGrid);
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = solve(u_of(c)).res, fd = solve(u_of(d)).res;
    while (b - a > 1e-12) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = solve(u_of(c)).res;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = solve(u_of(d)).res;
        }
    }
    const double lq = (a + b) / 2;
    const Solve s = solve(u_of(lq));
    std::vector<double> lens(lengths.begin(), lengths.end());
    if (lq <= lq_min + step || lq >= lq_max - step || !(s.b > 0)) {
        throw FitDegenerate("purity decay does not fit A + B u^(m-1) with 0 < u < 1 and B > 0", lens, purity);
    }
    fit.u_hat = u_of(lq);
    fit.a_offset = s.a;
    fit.b_scale = s.b;
    fit.residual = std::sqrt(s.res / static_cast<double>(lengths.size()));
    return fit;
}

RbDecayFit purity_rb(const PTMatrix &noise, const PurityRbConfig &config) {
    const std::size_t nq = noise.num_qubits();
    if (!noise.trace_preserving()) {
        throw InvalidInput("purity_rb: noise channel is not trace preserving");
    }
    if (config.n_sequences < 1 || config.lengths.empty()) {
        throw InvalidInput("purity_rb: need sequences and lengths");
    }
    if (config.shots && *config.shots < 1) {
        throw InvalidInput("purity_rb: shots must be positive");
    }
    const CliffordGroup &group = CliffordGroup::get(nq);
    const Eigen::Index dd = noise.size();
    const double d = static_cast<double>(noise.dim());

    Eigen::VectorXd start = Eigen::VectorXd::Zero(dd);
    for (std::size_t k = 0; k < pow4(nq); ++k) {
        std::string label = PauliLabel::from_index(k, nq).str();
        if (label.find_first_of("XY") == std::string::npos) {
            start(static_cast<Eigen::Index>(k)) = 1;
        }
    }

    std::vector<double> means, stds;
    for (int m : config.lengths) {
        if (m < 1) {
            throw InvalidInput("purity_rb: lengths must be >= 1");
        }
        double sum = 0, sum2 = 0;
        for (int s = 0; s < config.n_sequences; ++s) {
            std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                              static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(s)};
            std::mt19937_64 rng(seq);
            std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
            Eigen::VectorXd b = start, tmp(dd);
            for (int step = 0; step < m; ++step) {
                tmp(0) = b(0);
                group[pick(rng)].apply(b.data() + 1, tmp.data() + 1);
                b.noalias() = noise.r * tmp;
            }
            double purity = 0;
            if (config.shots) {
                const int shots = *config.shots;
                purity = 1;
                for (Eigen::Index k = 1; k < dd; ++k) {
                    const double p = std::clamp((1 + b(k)) / 2, 0.0, 1.0);
                    std::binomial_distribution<int> draw(shots, p);
                    const double est = 2.0 * draw(rng) / shots - 1;
                    purity += est * est;
                }
                purity /= d;
            } else {
                purity = b.squaredNorm() / d;
            }
            sum += purity;
            sum2 += purity * purity;
        }
        const double n = config.n_sequences;
        means.push_back(sum / n);
        stds.push_back(n > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / n) / (n - 1))) : 0.0);
    }
    RbDecayFit fit = fit_purity_decay(config.lengths, means);
    fit.std_purity = stds;
    return fit;
}

// ---------------------------------------------------------- entangling power

namespace {

void check_bipartite(const CMatrix &u, Eigen::Index d1, Eigen::Index d2) {
    if (d1 < 1 || d2 < 1 || u.rows() != d1 * d2 || u.cols() != d1 * d2) {
        throw InvalidInput("unitary dimension does not match d1 * d2");
    }
    if (!is_unitary(u)) {
        throw InvalidInput("unitary entanglement requires a unitary");
    }
}

}  // namespace

double unitary_entanglement_reduced(const CMatrix &u, Eigen::Index d1, Eigen::Index d2) {
    check_bipartite(u, d1, d2);
    const double d = static_cast<double>(d1 * d2);
    // Rows (a, a'), columns (b, b') of the state with amplitude U[(a b), (a' b')] / sqrt(d).
    CMatrix m(d1 * d1, d2 * d2);
    for (Eigen::Index a = 0; a < d1; ++a) {
        for (Eigen::Index b = 0; b < d2; ++b) {
            for (Eigen::Index ap = 0; ap < d1; ++ap) {
                for (Eigen::Index bp = 0; bp < d2; ++bp) {
                    m(a * d1 + ap, b * d2 + bp) = u(a * d2 + b, ap * d2 + bp) / std::sqrt(d);
                }
            }
        }
    }
    CMatrix rho = m * m.adjoint();
    return 1 - rho.squaredNorm();
}

double unitary_entanglement(const CMatrix &u, Eigen::Index d1, Eigen::Index d2) {
    check_bipartite(u, d1, d2);
    const Eigen::Index d = d1 * d2;
    CMatrix uu = kron(u, u);
    // Swap of the two H1 factors in the ordering (1, 2, 1', 2').
    std::vector<Eigen::Index> perm(d * d);
    for (Eigen::Index a = 0; a < d1; ++a) {
        for (Eigen::Index b = 0; b < d2; ++b) {
            for (Eigen::Index ap = 0; ap < d1; ++ap) {
                for (Eigen::Index bp = 0; bp < d2; ++bp) {
                    perm[(a * d2 + b) * d + ap * d2 + bp] = (ap * d2 + b) * d + a * d2 + bp;
                }
            }
        }
    }
    cdouble tr = 0;
    for (Eigen::Index i = 0; i < d * d; ++i) {
        for (Eigen::Index j = 0; j < d * d; ++j) {
            tr += std::conj(uu(i, j)) * uu(perm[i], perm[j]);
        }
    }
    return 1 - tr.real() / static_cast<double>(d * d);
}

double entanglement_from_heat(double nu_yz, double nu_zz, double t) {
    CMatrix h = (nu_yz * pauli_matrix("YZ") + nu_zz * pauli_matrix("ZZ")) / 2.0;
    return unitary_entanglement(mat_exp(h, t), 2, 2);
}

}  // namespace rotecho
