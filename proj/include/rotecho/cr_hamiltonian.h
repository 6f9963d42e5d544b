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

#ifndef ROTECHO_CR_HAMILTONIAN_H
#define ROTECHO_CR_HAMILTONIAN_H

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rotecho/pauli.h"

namespace rotecho {

/// Coefficients of H = sum_P nu_P P/2 on (control, target), in rad/s.
struct CrCoefficients {
    double nu_ix = 0;
    double nu_iy = 0;
    double nu_iz = 0;
    double nu_zi = 0;
    double nu_zx = 0;
    double nu_zy = 0;
    double nu_zz = 0;

    static const std::array<std::string_view, 7> &labels();
    double get(std::string_view label) const;
    void set(std::string_view label, double value);
    bool operator==(const CrCoefficients &) const = default;
};

struct DriveConfig {
    double omega_cr = 0;      // rad/s
    double omega_rotary = 0;  // rad/s
    double omega_xtalk = 0;   // rad/s
    double phi_c = 0;         // rad
    double phi_r = 0;         // rad
    double phi_t = 0;         // rad
    double t_pulse = 0;       // s
};

struct CombinedTone {
    double omega = 0;
    double phi = 0;
};

/// Sums the crosstalk and rotary tones on the target into one tone with
/// omega * e^{i phi} = omega_xtalk e^{-i phi_t} + omega_rotary e^{i phi_r}.
///
/// The amplitude carries the sign of the rotary amplitude (or of the crosstalk
/// amplitude when there is no rotary), so flipping both input amplitudes flips
/// the output amplitude and keeps the phase.
CombinedTone combine_tones(const DriveConfig &cfg);

/// Contribution of a combined target tone to (nu_IX, nu_IY).
std::pair<double, double> target_tone_terms(const CombinedTone &tone);

CMatrix build_hamiltonian(const CrCoefficients &c);

/// Coefficients of H(-Omega): drive-odd terms (IX, IY, ZX, ZY) flip sign.
CrCoefficients negate_drive(const CrCoefficients &c);

/// True when a label's coefficient is odd in the drive amplitude, i.e. when the
/// target letter (second position) is X or Y.
bool is_drive_odd(const PauliLabel &label);

/// nu(x) = c0 + c1 x + c2 x^2 in rad/s.
struct QuadraticTerm {
    double c0 = 0;
    double c1 = 0;
    double c2 = 0;
    bool odd = false;

    double operator()(double x) const {
        return c0 + (c1 + c2 * x) * x;
    }
};

/// Classical crosstalk from the CR tone plus a rotary tone of amplitude
/// rotary_per_x * x, both on the target and combined via combine_tones.
struct CrosstalkTone {
    double omega_t = 0;       // rad/s
    double phi_t = 0;         // rad
    double rotary_per_x = 0;  // rad/s per unit x
};

/// Maps a rotary amplitude x to the positive-drive CR coefficients.
class CoefficientModel {
   public:
    enum class Mode { kDirect, kPhenomenological };

    static CoefficientModel direct(std::vector<std::pair<double, CrCoefficients>> points);
    static CoefficientModel phenomenological(
        std::map<std::string, QuadraticTerm> terms, std::optional<CrosstalkTone> crosstalk = std::nullopt);

    /// JSON layout:
    ///   {"mode": "phenomenological", "t_pulse_ns": 206.22,
    ///    "terms": {"ZX": {"theta0": .., "theta1": .., "theta2": .., "odd": true},
    ///              "IX": {"nu0_khz": .., "nu1_khz": .., "nu2_khz": .., "odd": true}},
    ///    "crosstalk": {"omega_t_khz": .., "phi_t_rad": .., "rotary_khz_per_x": ..}}
    ///   {"mode": "direct", "points": [{"x": .., "nu_khz": {"IX": .., ...}}]}
    /// Angle terms convert via nu = -2 theta / t_pulse.
    static CoefficientModel from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;

    Mode mode() const {
        return mode_;
    }
    CrCoefficients at(double x) const;
    const std::map<std::string, QuadraticTerm> &terms() const {
        return terms_;
    }
    const std::optional<CrosstalkTone> &crosstalk() const {
        return crosstalk_;
    }
    const std::vector<std::pair<double, CrCoefficients>> &points() const {
        return points_;
    }

    /// Copy with the ZX term multiplied by `scale` (the CR amplitude knob).
    CoefficientModel with_zx_scale(double scale) const;

   private:
    Mode mode_ = Mode::kPhenomenological;
    std::map<std::string, QuadraticTerm> terms_;
    std::optional<CrosstalkTone> crosstalk_;
    std::vector<std::pair<double, CrCoefficients>> points_;
};

enum class Asymptote { kGrows, kConstant, kZero, kVaries };
std::string_view asymptote_name(Asymptote a);

struct LargeRotaryReport {
    std::map<std::string, Asymptote> behavior;
    std::map<std::string, Asymptote> expected;
    std::vector<std::string> violations;
    bool ix_dominates = false;
};

/// Classifies each coefficient on the grid and compares with the large-rotary
/// limits: IX, IZ, ZZ grow; IY, ZI, ZX stay constant; ZY stays zero.
LargeRotaryReport large_rotary_checks(const CoefficientModel &model, const std::vector<double> &x_grid);

}  // namespace rotecho

#endif
