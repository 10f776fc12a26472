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

// Scalar entanglement observables of a pure three-qubit state: subsystem
// purity of the system qubit, Wootters pairwise tangles, one-vs-rest
// tangles and the residual three-tangle.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rcm/errors.hpp"
#include "rcm/qlinalg.hpp"
#include "rcm/state.hpp"

namespace rcm {

/// Tr[rho_0^2] for the reduced state of qubit 0.
inline double purity(const StateVector &s) {
    const Mat2 rho = reduced_density(s.amplitudes(), std::array<int, 1>{0});
    return rho.frobenius_norm2();
}

inline Mat4 pair_density(const StateVector &s, int i, int j) {
    if (i == j) {
        throw UsageError("pair observables need two distinct qubits");
    }
    return reduced_density(s.amplitudes(), std::array<int, 2>{std::min(i, j), std::max(i, j)});
}

/// Wootters concurrence max{0, a1 - a2 - a3 - a4} of the reduced state of
/// qubits i and j.
inline double concurrence(const StateVector &s, int i, int j) {
    const auto a = concurrence_alphas(pair_density(s, i, j)).eigenvalues;
    return std::max(0.0, a[0] - a[1] - a[2] - a[3]);
}

/// Pairwise tangle tau_{i|j} = concurrence^2.
inline double pair_tangle(const StateVector &s, int i, int j) {
    const double c = concurrence(s, i, j);
    return c * c;
}

/// tau_{i|rest} = 4 det rho_i.
inline double one_rest_tangle(const StateVector &s, int i) {
    if (i < 0 || i > 2) {
        throw UsageError("qubit index must be 0, 1 or 2");
    }
    const Mat2 rho = reduced_density(s.amplitudes(), std::array<int, 1>{i});
    const double det = (rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0)).real();
    return std::clamp(4.0 * det, 0.0, 1.0);
}

/// Rounding slack for the [0, 1] range of tangles.
inline constexpr double kTangleSlack = 1e-9;

namespace detail {

inline double clamp_three_tangle(double value) {
    if (value < -kTangleSlack) {
        throw NumericalError("three-tangle came out negative (" + std::to_string(value) + ")");
    }
    if (value > 1.0 + kTangleSlack) {
        throw NumericalError("three-tangle exceeds one (" + std::to_string(value) + ")");
    }
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace detail

/// tau_{i|jk} - tau_{i|j} - tau_{i|k} with the focus on qubit i. The value
/// is the same for every i; three_tangle uses i = 0.
inline double residual_tangle(const StateVector &s, int i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    return detail::clamp_three_tangle(one_rest_tangle(s, i) - pair_tangle(s, i, j) - pair_tangle(s, i, k));
}

inline double three_tangle(const StateVector &s) { return residual_tangle(s, 0); }

struct ObservableRecord {
    int t = 0;
    double purity = 1.0;
    double tangle01 = 0.0;
    double tangle02 = 0.0;
    double tangle12 = 0.0;
    double tau0_rest = 0.0;
    double tau1_rest = 0.0;
    double tau2_rest = 0.0;
    double three_tangle = 0.0;
};

inline ObservableRecord record(const StateVector &s, int t) {
    ObservableRecord r;
    r.t = t;
    r.purity = purity(s);
    r.tangle01 = pair_tangle(s, 0, 1);
    r.tangle02 = pair_tangle(s, 0, 2);
    r.tangle12 = pair_tangle(s, 1, 2);
    r.tau0_rest = one_rest_tangle(s, 0);
    r.tau1_rest = one_rest_tangle(s, 1);
    r.tau2_rest = one_rest_tangle(s, 2);
    r.three_tangle = detail::clamp_three_tangle(r.tau0_rest - r.tangle01 - r.tangle02);
    return r;
}

}  // namespace rcm
