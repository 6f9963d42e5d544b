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


#ifndef ROTECHO_FIT_H
#define ROTECHO_FIT_H

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "rotecho/heat.h"
#include "rotecho/pauli.h"
#include "rotecho/units.h"

namespace rotecho {

/// theta(x) = theta0 + theta1 x + theta2 x^2. Odd terms flip sign between U+ and U-.
struct ThetaTerm {
    double theta0 = 0;
    double theta1 = 0;
    double theta2 = 0;
    bool odd = false;

    double at(double x) const {
        return theta0 + theta1 * x + theta2 * x * x;
    }
    bool operator==(const ThetaTerm &) const = default;
};

/// Drive parity of a control-target-spectator label: odd iff the target letter is X or Y.
bool default_odd_parity(std::string_view label);

class ThetaModel {
   public:
    /// Labels are always three letters (control, target, spectator).
    explicit ThetaModel(std::size_t qubit_count = 2, double t_pulse = kDefaultPulseTime);

    /// Fitted single-pair model (control, target; spectator idle).
    static ThetaModel reference_2q();
    /// Fitted target-spectator model.
    static ThetaModel reference_3q();

    std::size_t qubit_count() const {
        return qubit_count_;
    }
    double t_pulse() const {
        return t_pulse_;
    }
    const std::map<std::string, ThetaTerm> &terms() const {
        return terms_;
    }
    /// Parity defaults to default_odd_parity(label) when omitted.
    void set(const std::string &label, double theta0, double theta1 = 0, double theta2 = 0);
    void set(const std::string &label, const ThetaTerm &term);
    const ThetaTerm &term(const std::string &label) const;
    double angle(const std::string &label, double x) const;

    /// Copy with every odd term negated.
    ThetaModel parity_negated() const;

    /// {"mode": "theta", "t_pulse_ns": .., "qubit_count": 2,
    ///  "terms": {"ZXI": {"theta0": .., "theta1": .., "theta2": .., "odd": true}}}
    static ThetaModel from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;

    bool operator==(const ThetaModel &) const = default;

   private:
    std::size_t qubit_count_;
    double t_pulse_;
    std::map<std::string, ThetaTerm> terms_;
};

/// U+ or U- = exp(i sum_P s_P theta_P(x) P), with s_P = -1 for odd terms in U-.
/// 4x4 (control, target) for two-qubit models, 8x8 otherwise.
CMatrix theta_unitary(const ThetaModel &model, double x, int sign);

/// XII . U- . XII . U+ (control flips between the halves).
CMatrix theta_echo(const ThetaModel &model, double x);

struct SweepPoint {
    double x = 0;
    /// Three-letter Pauli label of an echoed nu_tilde.
    std::string observable;
    /// nu_tilde in rad/s.
    double value = 0;
    double weight = 1;
};

struct SweepDataset {
    std::vector<SweepPoint> rows;

    /// Sorted x, positive weights, known labels.
    void validate() const;
    std::vector<double> x_values() const;
    /// Columns x,observable,nu_khz,weight; '#' lines are comments.
    std::string to_csv() const;
    static SweepDataset from_csv(const std::string &text);
};

struct SweepConfig {
    HeatConfig heat;
    /// Repetition count used for reconstruction; must be in heat.reps.
    int n = 2;
    /// Empty selects default_observables(qubit_count).
    std::vector<std::string> observables;
};

/// Two qubits: IYI, IZI, ZYI, ZZI. Three qubits: IYI, IZI, IYZ, IZZ.
std::vector<std::string> default_observables(std::size_t qubit_count);

/// HEAT-reconstructed nu_tilde of the echoed gate at one x, for every label the
/// reconstruction provides.
std::map<std::string, double> heat_observables(const ThetaModel &model, double x, const SweepConfig &cfg);

/// Simulates HEAT at every x and records the reconstructed observables.
SweepDataset synthesize_sweep(const ThetaModel &model, const std::vector<double> &x_grid,
                              const SweepConfig &cfg = {});

/// Reconstructs imported HEAT records, one per x. zx_sign = -1 marks records taken
/// on an echo whose ZX rotation is negative.
SweepDataset sweep_from_heat_records(const std::vector<std::pair<double, HeatRecord>> &records,
                                     std::size_t qubit_count, int n, double t_pulse,
                                     const std::vector<std::string> &observables = {}, int zx_sign = 1);

/// One free coefficient: theta_order of a label.
struct ThetaParam {
    std::string label;
    int order = 0;
    bool operator==(const ThetaParam &) const = default;
};

std::vector<ThetaParam> reference_mask_2q();
/// Target-spectator fit; control-target terms are carried from the two-qubit fit.
std::vector<ThetaParam> reference_mask_3q();

double get_param(const ThetaModel &m, const ThetaParam &p);
void set_param(ThetaModel &m, const ThetaParam &p, double value);

struct SimplexOptions {
    int max_evaluations = 4000;
    /// Stop when the objective spread across the simplex is below ftol_rel |f_min| + ftol_abs.
    double ftol_rel = 1e-10;
    double ftol_abs = 1e-22;
    /// ... and every vertex lies within xtol_rel |x| + xtol_abs of the best one.
    double xtol_rel = 1e-10;
    double xtol_abs = 1e-12;
};

struct SimplexResult {
    std::vector<double> x;
    double f = 0;
    bool converged = false;
    int evaluations = 0;
};

/// Derivative-free Nelder-Mead descent from x0 with per-coordinate initial steps.
SimplexResult minimize_simplex(const std::function<double(const std::vector<double> &)> &f,
                               const std::vector<double> &x0, const std::vector<double> &steps,
                               const SimplexOptions &opts = {});

struct FitOptions {
    int restarts = 8;
    std::uint64_t seed = 1;
    /// Relative spread of the perturbed starting points.
    double start_spread = 0.3;
    SimplexOptions simplex;
    SweepConfig sweep;
};

struct ThetaFit {
    ThetaModel model;
    std::vector<ThetaParam> free;
    /// sum w (t (model - data))^2 at the optimum.
    double objective = 0;
    /// Root-mean-square misfit in kHz.
    double rms_khz = 0;
    /// sigma^2 (J^T J)^+ in parameter units.
    RMatrix covariance;
    bool converged = false;
    int evaluations = 0;
};

/// Weighted misfit of model against data.
double sweep_objective(const SweepDataset &data, const ThetaModel &model, const SweepConfig &cfg = {});

/// d(residual)/d(param) by central differences; residuals are sqrt(w) t (model - data).
RMatrix sweep_jacobian(const SweepDataset &data, const std::vector<ThetaParam> &free, const ThetaModel &at,
                       const SweepConfig &cfg = {});

/// Multi-start simplex least squares over the free coefficients of init.
ThetaFit fit_theta(const SweepDataset &data, const std::vector<ThetaParam> &free, const ThetaModel &init,
                   const FitOptions &opts = {});

}  // namespace rotecho

#endif
