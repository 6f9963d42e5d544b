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

#ifndef ROTECHO_UNITS_H
#define ROTECHO_UNITS_H

#include <numbers>

namespace rotecho {

/// Angular frequencies are stored in rad/s; user-facing files use kHz or MHz.
inline constexpr double khz_to_rad_s(double khz) {
    return 2 * std::numbers::pi * 1e3 * khz;
}
inline constexpr double rad_s_to_khz(double w) {
    return w / (2 * std::numbers::pi * 1e3);
}
inline constexpr double mhz_to_rad_s(double mhz) {
    return 2 * std::numbers::pi * 1e6 * mhz;
}
inline constexpr double rad_s_to_mhz(double w) {
    return w / (2 * std::numbers::pi * 1e6);
}
inline constexpr double ns_to_s(double ns) {
    return ns * 1e-9;
}
inline constexpr double us_to_s(double us) {
    return us * 1e-6;
}

/// Pulse time of one echo half used by the quadratic angle model.
inline constexpr double kDefaultPulseTime = 206.22e-9;

}  // namespace rotecho

#endif
