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

#ifndef ROTECHO_ERRORS_H
#define ROTECHO_ERRORS_H

#include <stdexcept>
#include <string>
#include <vector>

namespace rotecho {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed argument: wrong dimension, non-unitary input, probability out of range, ...
class InvalidInput : public Error {
   public:
    using Error::Error;
};

/// A principal matrix logarithm was requested for a unitary with an eigenvalue
/// too close to -1, where the branch choice is ambiguous.
class BranchAmbiguity : public Error {
   public:
    BranchAmbiguity(const std::string &what, double eigenphase) : Error(what), eigenphase_(eigenphase) {
    }
    double eigenphase() const {
        return eigenphase_;
    }

   private:
    double eigenphase_;
};

/// A closed-form expression divides by a vanishing norm; callers should use the
/// numeric matrix-log path instead.
class DegenerateNorm : public Error {
   public:
    using Error::Error;
};

/// A measurement record does not contain the cells a reconstruction needs.
class IncompleteData : public Error {
   public:
    using Error::Error;
};

/// The operation is not defined for this kind of model (e.g. direct-mode coefficients).
class UnsupportedMode : public Error {
   public:
    using Error::Error;
};

/// Request outside the desk-scale envelope this library supports.
class OutOfScope : public Error {
   public:
    using Error::Error;
};

/// Circuit parameters sit too close to a resonance pole.
class NearResonance : public Error {
   public:
    using Error::Error;
};

/// Decay data could not be fitted; the raw curve is kept for inspection.
class FitDegenerate : public Error {
   public:
    FitDegenerate(const std::string &what, std::vector<double> lengths, std::vector<double> values)
        : Error(what), lengths_(std::move(lengths)), values_(std::move(values)) {
    }
    const std::vector<double> &lengths() const {
        return lengths_;
    }
    const std::vector<double> &values() const {
        return values_;
    }

   private:
    std::vector<double> lengths_;
    std::vector<double> values_;
};

/// Configuration document violates its schema.
class ConfigError : public Error {
   public:
    using Error::Error;
};

}  // namespace rotecho

#endif
