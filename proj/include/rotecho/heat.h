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

#ifndef ROTECHO_HEAT_H
#define ROTECHO_HEAT_H

#include <array>
#include <map>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rotecho/echo.h"
#include "rotecho/pauli.h"

namespace rotecho {

/// Y-type: target starts in |0>, N x (Y_pi after the gate), then Y_pi/2, measure Z.
/// Z-type: target starts in Y_pi/2 |0>, N x (Z_pi after the gate), measure Y.
/// The interleaved pulses act on the target only and are ideal.
enum class HeatKind { kY, kZ };

std::string_view heat_kind_name(HeatKind k);
HeatKind parse_heat_kind(std::string_view s);

struct HeatConfig {
    std::vector<int> reps{2, 4, 8};
    /// Preparation of the conditioning qubit (control, or spectator in the spectator case).
    std::vector<int> preps{0, 1};
    std::vector<HeatKind> kinds{HeatKind::kY, HeatKind::kZ};
    /// Binomial sampling per expectation when set; exact expectations otherwise.
    std::optional<int> shots;
    std::uint64_t seed = 0;

    void validate() const;
};

struct AxisAngle {
    double theta = 0;
    std::array<double, 3> axis{1, 0, 0};
    int prep = 0;
};

/// One (kind, prep, N) cell. y_err = tr(rho Z) and z_err = tr(rho Y) of the final target state.
struct HeatPoint {
    HeatKind kind = HeatKind::kY;
    int prep = 0;
    int n = 0;
    double y_err = 0;
    double z_err = 0;
    std::optional<int> shots;
    std::uint64_t seed = 0;
};

struct HeatRecord {
    std::vector<HeatPoint> points;

    const HeatPoint &at(HeatKind kind, int prep, int n) const;
    bool contains(HeatKind kind, int prep, int n) const;

    std::string to_csv() const;
    static HeatRecord from_csv(const std::string &text);
    nlohmann::json to_json() const;
    static HeatRecord from_json(const nlohmann::json &j);
};

/// U is the 4x4 control-target echoed gate.
HeatRecord run_heat_2q(const CMatrix &u, const HeatConfig &cfg);

struct HeatInversion {
    bool assume_zx_half_pi = true;
    /// Rotation angles of the two control blocks, used when assume_zx_half_pi is false.
    double theta0 = 0;
    double theta1 = 0;
};

struct Heat2qResult {
    AxisAngle block0;
    AxisAngle block1;
    /// A and B coefficients, with nu_tilde for II, IX, IY, IZ, ZX, ZY, ZZ; ZI is taken as 0.
    EchoReport report;
};

Heat2qResult reconstruct_2q(const HeatRecord &rec, int n, double t_half, const HeatInversion &opts = {});

/// Runs and inverts two-qubit HEAT on an echoed gate, returning nu_tilde by label.
/// zx_sign < 0 marks a negative ZX rotation: the gate is measured in the target
/// frame rotated by Z_pi and the IX, IY, ZX, ZY values are mapped back.
std::map<std::string, double> heat_echo_nu_tilde(const CMatrix &u, const HeatConfig &cfg, int n, double t_half,
                                                 int zx_sign = 1);
/// Inversion half of heat_echo_nu_tilde for records already taken in the rotated frame.
std::map<std::string, double> heat_record_nu_tilde(const HeatRecord &rec, int n, double t_half, int zx_sign = 1);

/// u is 4x4 target x spectator, or 8x8 control x target x spectator with the control held in |0>.
HeatRecord run_heat_spectator(const CMatrix &u, const HeatConfig &cfg);

/// Target x spectator coefficients; yz means Y on the target and Z on the spectator.
struct SpectatorHeatResult {
    cdouble a_ii;
    cdouble a_y;
    cdouble a_z;
    cdouble a_yz;
    cdouble a_zz;
    /// Amplified angle outside the small-angle regime (|theta| N >= 0.5 rad).
    bool linearity_warning = false;
};

SpectatorHeatResult reconstruct_spectator(const HeatRecord &rec, int n);

/// Single-qubit case: only prep 0 is used.
HeatRecord run_heat_1q(const CMatrix &u, const HeatConfig &cfg);

struct OneQubitHeatResult {
    cdouble a_i;
    cdouble a_y;
    cdouble a_z;
    bool linearity_warning = false;
};

OneQubitHeatResult reconstruct_1q(const HeatRecord &rec, int n);

}  // namespace rotecho

#endif
