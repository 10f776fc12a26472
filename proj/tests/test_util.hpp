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

// Helpers shared by the unit tests: random inputs and oracles that do not
// go through the library code paths they check.

#include <algorithm>
#include <array>
#include <complex>
#include <vector>

#include "rcm/qlinalg.hpp"
#include "rcm/random.hpp"
#include "rcm/state.hpp"

namespace rcm::testing {

template <std::size_t R, std::size_t C>
CMatrix<R, C> random_matrix(RandomStream &rng) {
    CMatrix<R, C> m;
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            m(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    return m;
}

template <std::size_t N>
CMatrix<N, N> random_hermitian(RandomStream &rng) {
    const auto a = random_matrix<N, N>(rng);
    return 0.5 * (a + a.adjoint());
}

/// Full-rank random density matrix A A^H / Tr(A A^H).
template <std::size_t N>
CMatrix<N, N> random_density(RandomStream &rng) {
    const auto a = random_matrix<N, N>(rng);
    auto rho = a * a.adjoint();
    return rho * (1.0 / rho.trace().real());
}

inline StateVector random_state(RandomStream &rng) {
    std::array<Complex, 8> a{};
    double n2 = 0.0;
    for (auto &z : a) {
        z = Complex(rng.normal(), rng.normal());
        n2 += std::norm(z);
    }
    for (auto &z : a) {
        z /= std::sqrt(n2);
    }
    return StateVector::from_drifting(a);
}

/// Coefficients c_0..c_N of det(x I - M) = sum c_k x^k (c_N = 1) by the
/// Faddeev-LeVerrier recursion.
template <std::size_t N>
std::vector<Complex> characteristic_polynomial(const CMatrix<N, N> &m) {
    std::vector<Complex> c(N + 1);
    c[N] = 1.0;
    CMatrix<N, N> mk;  // M_0 = 0
    for (std::size_t k = 1; k <= N; ++k) {
        CMatrix<N, N> shifted = mk;
        for (std::size_t i = 0; i < N; ++i) {
            shifted(i, i) += c[N - k + 1];
        }
        mk = m * shifted;
        c[N - k] = -mk.trace() / static_cast<double>(k);
    }
    return c;
}

/// All complex roots of a monic polynomial (Durand-Kerner iteration).
inline std::vector<Complex> polynomial_roots(const std::vector<Complex> &c) {
    const std::size_t n = c.size() - 1;
    std::vector<Complex> z(n);
    const Complex seed(0.4, 0.9);
    double scale = 1.0;
    for (const auto &x : c) {
        scale = std::max(scale, std::abs(x));
    }
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = scale * std::pow(seed, static_cast<double>(i));
    }
    auto eval = [&](Complex x) {
        Complex v = 0.0;
        for (std::size_t k = n + 1; k-- > 0;) {
            v = v * x + c[k];
        }
        return v;
    };
    for (int iter = 0; iter < 2000; ++iter) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Complex denom = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    denom *= z[i] - z[j];
                }
            }
            const Complex delta = eval(z[i]) / denom;
            z[i] -= delta;
            change = std::max(change, std::abs(delta));
        }
        if (change < 1e-15) {
            break;
        }
    }
    // Newton polish.
    for (auto &x : z) {
        for (int it = 0; it < 5; ++it) {
            Complex v = 0.0;
            Complex dv = 0.0;
            for (std::size_t k = n + 1; k-- > 0;) {
                dv = dv * x + v;
                v = v * x + c[k];
            }
            if (std::abs(dv) > 0.0) {
                x -= v / dv;
            }
        }
    }
    return z;
}

/// Eigenvalue real parts via the characteristic polynomial, non-increasing.
template <std::size_t N>
std::vector<double> eigenvalues_by_polynomial(const CMatrix<N, N> &m) {
    const auto roots = polynomial_roots(characteristic_polynomial(m));
    std::vector<double> out;
    for (const auto &r : roots) {
        out.push_back(r.real());
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// Partial trace by direct summation over all 64 matrix elements.
inline std::vector<Complex> brute_partial_trace(const Mat8 &rho, const std::vector<int> &keep) {
    const std::size_t k = keep.size();
    const std::size_t d = std::size_t{1} << k;
    std::vector<Complex> out(d * d);
    auto bit = [](std::size_t index, int q) { return (index >> (2 - q)) & 1U; };
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            bool traced_equal = true;
            for (int q = 0; q < 3; ++q) {
                if (std::find(keep.begin(), keep.end(), q) == keep.end() && bit(i, q) != bit(j, q)) {
                    traced_equal = false;
                }
            }
            if (!traced_equal) {
                continue;
            }
            std::size_t a = 0;
            std::size_t b = 0;
            for (int q : keep) {
                a = (a << 1) | bit(i, q);
                b = (b << 1) | bit(j, q);
            }
            out[a * d + b] += rho(i, j);
        }
    }
    return out;
}

inline StateVector ghz_state() {
    std::array<Complex, 8> a{};
    a[0] = std::sqrt(0.5);
    a[7] = std::sqrt(0.5);
    return StateVector::from_drifting(a);
}

inline StateVector w_state() {
    std::array<Complex, 8> a{};
    a[4] = a[2] = a[1] = 1.0 / std::sqrt(3.0);
    return StateVector::from_drifting(a);
}

}  // namespace rcm::testing
