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

// Haar-random unitaries on U(4) and Haar-random pure states.
//
// Two structurally different samplers are provided. sample_hurwitz composes
// two-level rotations with specifically distributed angles; sample_ginibre
// orthonormalizes a complex Gaussian matrix. They are cross-checked against
// each other statistically in the tests.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/qlinalg.hpp"
#include "rcm/random.hpp"
#include "rcm/state.hpp"

namespace rcm {

/// A 4x4 unitary: one collision.
class Unitary4 {
   public:
    static constexpr double kTolerance = 1e-10;

    Unitary4() : m_(Mat4::identity()) {}

    explicit Unitary4(const Mat4 &m) : m_(m) {
        if (max_abs_diff(m.adjoint() * m, Mat4::identity()) > kTolerance) {
            throw NumericalError("matrix is not unitary");
        }
    }

    [[nodiscard]] const Mat4 &matrix() const { return m_; }
    const Complex &operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    /// Largest entrywise deviation of U^H U from the identity.
    [[nodiscard]] double unitarity_error() const { return max_abs_diff(m_.adjoint() * m_, Mat4::identity()); }

   private:
    Mat4 m_;
};

enum class Sampler { hurwitz, ginibre };

inline std::string_view to_string(Sampler s) { return s == Sampler::hurwitz ? "hurwitz" : "ginibre"; }

inline Sampler parse_sampler(std::string_view text) {
    if (text == "hurwitz") {
        return Sampler::hurwitz;
    }
    if (text == "ginibre") {
        return Sampler::ginibre;
    }
    throw UsageError("unknown sampler '" + std::string(text) + "' (valid: hurwitz, ginibre)");
}

namespace detail {

// Two-level rotation in the (k, l) plane, k < l:
//   [  cos(phi) e^{i psi}    sin(phi) e^{i chi} ]
//   [ -sin(phi) e^{-i chi}   cos(phi) e^{-i psi} ]
// Right-multiplies `m` in place, touching only columns k and l.
inline void apply_two_level_right(Mat4 &m, std::size_t k, std::size_t l, double phi, double psi, double chi) {
    const Complex a = std::polar(std::cos(phi), psi);
    const Complex b = std::polar(std::sin(phi), chi);
    const Complex c = -std::conj(b);
    const Complex d = std::conj(a);
    for (std::size_t i = 0; i < 4; ++i) {
        const Complex mk = m(i, k);
        const Complex ml = m(i, l);
        m(i, k) = mk * a + ml * c;
        m(i, l) = mk * b + ml * d;
    }
}

}  // namespace detail

/// Haar-random U(4) in the Hurwitz parametrization:
///
///   U = e^{i alpha} E_1 E_2 E_3,
///   E_s = E^{(s,s+1)}(phi_{s,s}, psi_{s,s}, 0) ... E^{(2,3)}(phi_{2,s}, psi_{2,s}, 0)
///         E^{(1,2)}(phi_{1,s}, psi_{1,s}, chi_s),
///
/// with psi, chi, alpha uniform on [0, 2pi) and phi_{r,s} = arcsin(xi^{1/(2r)})
/// for xi uniform on [0, 1). Each block E_s carries a uniformly distributed
/// last row on the unit sphere of C^{s+1}, which is what makes the product
/// Haar distributed.
inline Unitary4 sample_hurwitz(RandomStream &rng) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Mat4 u = Mat4::identity();
    for (std::size_t s = 1; s <= 3; ++s) {
        // Factors of E_s are multiplied left to right: planes (s, s+1) down to (1, 2).
        for (std::size_t r = s; r >= 1; --r) {
            const double xi = rng.uniform();
            const double phi = std::asin(std::pow(xi, 1.0 / (2.0 * static_cast<double>(r))));
            const double psi = two_pi * rng.uniform();
            const double chi = r == 1 ? two_pi * rng.uniform() : 0.0;
            detail::apply_two_level_right(u, r - 1, r, phi, psi, chi);
        }
    }
    u *= std::polar(1.0, two_pi * rng.uniform());
    return Unitary4(u);
}

/// Haar-random U(4) from the QR decomposition of a complex Ginibre matrix,
/// with the diagonal of R made positive (modified Gram-Schmidt does this).
inline Unitary4 sample_ginibre(RandomStream &rng) {
    std::array<std::array<Complex, 4>, 4> cols{};
    for (auto &col : cols) {
        for (auto &z : col) {
            const double re = rng.normal();
            const double im = rng.normal();
            z = Complex(re, im);
        }
    }
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            Complex proj = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                proj += std::conj(cols[i][k]) * cols[j][k];
            }
            for (std::size_t k = 0; k < 4; ++k) {
                cols[j][k] -= proj * cols[i][k];
            }
        }
        double n2 = 0.0;
        for (const auto &z : cols[j]) {
            n2 += std::norm(z);
        }
        if (n2 < 1e-300) {
            throw NumericalError("sample_ginibre: degenerate Gaussian matrix");
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (auto &z : cols[j]) {
            z *= inv;
        }
    }
    Mat4 q;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            q(i, j) = cols[j][i];
        }
    }
    return Unitary4(q);
}

inline Unitary4 sample_unitary(Sampler sampler, RandomStream &rng) {
    return sampler == Sampler::hurwitz ? sample_hurwitz(rng) : sample_ginibre(rng);
}

/// Uniformly random unit vector in C^dim, dim in {2, 4, 8}.
inline std::vector<Complex> sample_pure_state(RandomStream &rng, int dim) {
    if (dim != 2 && dim != 4 && dim != 8) {
        throw UsageError("sample_pure_state: dimension must be 2, 4 or 8, got " + std::to_string(dim));
    }
    std::vector<Complex> v(static_cast<std::size_t>(dim));
    double n2 = 0.0;
    for (auto &z : v) {
        const double re = rng.normal();
        const double im = rng.normal();
        z = Complex(re, im);
        n2 += std::norm(z);
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto &z : v) {
        z *= inv;
    }
    return v;
}

/// Haar-random pure three-qubit state.
inline StateVector sample_state8(RandomStream &rng) {
    const auto v = sample_pure_state(rng, 8);
    std::array<Complex, 8> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return StateVector::from_drifting(a);
}

}  // namespace rcm
