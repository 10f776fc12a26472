// Copyright 2026 The rcm Authors
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

#pragma once

#include <array>
#include <cmath>
#include <span>

#include "rcm/errors.hpp"
#include "rcm/qlinalg.hpp"

namespace rcm {

/// Pure three-qubit state, amplitudes in basis order |q0 q1 q2> with q0 the
/// most significant bit. Always unit norm.
class StateVector {
   public:
    static constexpr double kNormTolerance = 1e-10;

    /// |000>.
    StateVector() { amps_[0] = 1.0; }

    explicit StateVector(const std::array<Complex, 8> &amps) : amps_(amps) {
        if (std::abs(norm2() - 1.0) > kNormTolerance) {
            throw NumericalError("state vector is not normalized");
        }
    }

    [[nodiscard]] std::span<const Complex, 8> amplitudes() const { return amps_; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm2() const {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    /// |psi><psi| as an 8x8 matrix.
    [[nodiscard]] Mat8 density() const {
        Mat8 rho;
        for (std::size_t i = 0; i < 8; ++i) {
            for (std::size_t j = 0; j < 8; ++j) {
                rho(i, j) = amps_[i] * std::conj(amps_[j]);
            }
        }
        return rho;
    }

    /// Builds a state from amplitudes that are unit norm up to rounding
    /// drift; rescales when the drift exceeds 1e-12.
    static StateVector from_drifting(std::array<Complex, 8> amps) {
        double n2 = 0.0;
        for (const auto &a : amps) {
            n2 += std::norm(a);
        }
        if (std::abs(n2 - 1.0) > 1e-12) {
            const double scale = 1.0 / std::sqrt(n2);
            for (auto &a : amps) {
                a *= scale;
            }
        }
        return StateVector(amps);
    }

    friend bool operator==(const StateVector &, const StateVector &) = default;

   private:
    std::array<Complex, 8> amps_{};
};

}  // namespace rcm
