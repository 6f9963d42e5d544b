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

#ifndef ROTECHO_NOISE_H
#define ROTECHO_NOISE_H

#include <cmath>
#include <limits>
#include <vector>

#include "rotecho/errors.h"

namespace rotecho {

/// Relaxation times of one qubit, in seconds. Infinite values disable decay.
struct QubitNoise {
    double t1 = std::numeric_limits<double>::infinity();
    double t2 = std::numeric_limits<double>::infinity();

    void validate() const {
        if (!(t1 > 0) || !(t2 > 0)) {
            throw InvalidInput("T1 and T2 must be positive");
        }
        if (t2 > 2 * t1 * (1 + 1e-12)) {
            throw InvalidInput("T2 must not exceed 2 T1");
        }
    }
    /// Pure dephasing time 2 T1 T2 / (2 T1 - T2); infinite when T2 = 2 T1.
    double t_phi() const {
        validate();
        if (std::isinf(t2)) {
            return std::numeric_limits<double>::infinity();
        }
        if (std::isinf(t1)) {
            return t2;
        }
        double den = 2 * t1 - t2;
        if (den <= 1e-15 * t1) {
            return std::numeric_limits<double>::infinity();
        }
        return 2 * t1 * t2 / den;
    }
    /// 1 - exp(-t / (2 T1)).
    double gamma_a(double t) const {
        validate();
        return std::isinf(t1) ? 0.0 : -std::expm1(-t / (2 * t1));
    }
    /// 1 - exp(-t / T_phi).
    double gamma_p(double t) const {
        double tp = t_phi();
        return std::isinf(tp) ? 0.0 : -std::expm1(-t / tp);
    }
};

struct NoiseParams {
    std::vector<QubitNoise> qubits;
};

}  // namespace rotecho

#endif
