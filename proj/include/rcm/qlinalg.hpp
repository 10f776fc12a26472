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

// Dense complex linear algebra for the fixed small dimensions of a
// three-qubit system: 2x2, 4x4 and 8x8 matrices stored row-major in
// std::array. Dimensions are template parameters, so shape errors
// (an oversized Kronecker product, a non-square partial trace) are
// rejected at compile time.
//
// Qubit ordering: qubit 0 is the most significant bit of a basis index,
// i.e. |q0 q1 q2> has index 4*q0 + 2*q1 + q2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "rcm/errors.hpp"

namespace rcm {

using Complex = std::complex<double>;

constexpr bool is_supported_dim(std::size_t n) { return n == 1 || n == 2 || n == 4 || n == 8; }

template <std::size_t R, std::size_t C>
class CMatrix {
    static_assert(is_supported_dim(R) && is_supported_dim(C), "CMatrix dimensions must be 1, 2, 4 or 8");

   public:
    static constexpr std::size_t rows = R;
    static constexpr std::size_t cols = C;

    CMatrix() = default;
    explicit CMatrix(const std::array<Complex, R * C> &entries) : entries_(entries) {}

    static CMatrix identity()
        requires(R == C)
    {
        CMatrix m;
        for (std::size_t i = 0; i < R; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static CMatrix diagonal(const std::array<Complex, R> &d)
        requires(R == C)
    {
        CMatrix m;
        for (std::size_t i = 0; i < R; ++i) {
            m(i, i) = d[i];
        }
        return m;
    }

    Complex &operator()(std::size_t i, std::size_t j) { return entries_[i * C + j]; }
    const Complex &operator()(std::size_t i, std::size_t j) const { return entries_[i * C + j]; }

    [[nodiscard]] std::span<const Complex, R * C> entries() const { return entries_; }

    [[nodiscard]] CMatrix<C, R> adjoint() const {
        CMatrix<C, R> out;
        for (std::size_t i = 0; i < R; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                out(j, i) = std::conj((*this)(i, j));
            }
        }
        return out;
    }

    [[nodiscard]] CMatrix conjugate() const {
        CMatrix out;
        for (std::size_t k = 0; k < R * C; ++k) {
            out.entries_[k] = std::conj(entries_[k]);
        }
        return out;
    }

    [[nodiscard]] Complex trace() const
        requires(R == C)
    {
        Complex t = 0.0;
        for (std::size_t i = 0; i < R; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    /// Sum of |entry|^2.
    [[nodiscard]] double frobenius_norm2() const {
        double s = 0.0;
        for (const auto &z : entries_) {
            s += std::norm(z);
        }
        return s;
    }

    CMatrix &operator+=(const CMatrix &o) {
        for (std::size_t k = 0; k < R * C; ++k) {
            entries_[k] += o.entries_[k];
        }
        return *this;
    }
    CMatrix &operator-=(const CMatrix &o) {
        for (std::size_t k = 0; k < R * C; ++k) {
            entries_[k] -= o.entries_[k];
        }
        return *this;
    }
    CMatrix &operator*=(Complex s) {
        for (auto &z : entries_) {
            z *= s;
        }
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
    friend bool operator==(const CMatrix &, const CMatrix &) = default;

   private:
    std::array<Complex, R * C> entries_{};
};

using Mat2 = CMatrix<2, 2>;
using Mat4 = CMatrix<4, 4>;
using Mat8 = CMatrix<8, 8>;

template <std::size_t R, std::size_t K, std::size_t C>
CMatrix<R, C> operator*(const CMatrix<R, K> &a, const CMatrix<K, C> &b) {
    CMatrix<R, C> out;
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < C; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

/// Largest entrywise |a - b|.
template <std::size_t R, std::size_t C>
double max_abs_diff(const CMatrix<R, C> &a, const CMatrix<R, C> &b) {
    double d = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            d = std::max(d, std::abs(a(i, j) - b(i, j)));
        }
    }
    return d;
}

template <std::size_t N>
bool is_hermitian(const CMatrix<N, N> &m, double tol) {
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i; j < N; ++j) {
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) {
                return false;
            }
        }
    }
    return true;
}

template <std::size_t R1, std::size_t C1, std::size_t R2, std::size_t C2>
CMatrix<R1 * R2, C1 * C2> kron(const CMatrix<R1, C1> &a, const CMatrix<R2, C2> &b) {
    static_assert(R1 * R2 <= 8 && C1 * C2 <= 8, "Kronecker product exceeds 8x8");
    CMatrix<R1 * R2, C1 * C2> out;
    for (std::size_t i1 = 0; i1 < R1; ++i1) {
        for (std::size_t j1 = 0; j1 < C1; ++j1) {
            const Complex s = a(i1, j1);
            for (std::size_t i2 = 0; i2 < R2; ++i2) {
                for (std::size_t j2 = 0; j2 < C2; ++j2) {
                    out(i1 * R2 + i2, j1 * C2 + j2) = s * b(i2, j2);
                }
            }
        }
    }
    return out;
}

/// Pauli matrix by label 0 (identity), 1 (x), 2 (y), 3 (z).
inline Mat2 pauli(int label) {
    using namespace std::complex_literals;
    switch (label) {
        case 0:
            return Mat2({1.0, 0.0, 0.0, 1.0});
        case 1:
            return Mat2({0.0, 1.0, 1.0, 0.0});
        case 2:
            return Mat2({0.0, -1.0i, 1.0i, 0.0});
        case 3:
            return Mat2({1.0, 0.0, 0.0, -1.0});
        default:
            throw UsageError("Pauli label must be 0..3, got " + std::to_string(label));
    }
}

namespace detail {

// Maps (kept-qubit bits, traced-qubit bits) to a full 3-qubit basis index.
// Kept qubits must be sorted; the first kept qubit is the most significant
// bit of `kept_bits`, and likewise for the traced ones.
template <std::size_t K>
constexpr std::size_t compose_index(const std::array<int, K> &keep, std::size_t kept_bits, std::size_t traced_bits) {
    std::size_t index = 0;
    std::size_t ki = 0;
    std::size_t traced_left = 3 - K;
    for (int q = 0; q < 3; ++q) {
        std::size_t bit;
        if (ki < K && keep[ki] == q) {
            bit = (kept_bits >> (K - 1 - ki)) & 1U;
            ++ki;
        } else {
            --traced_left;
            bit = (traced_bits >> traced_left) & 1U;
        }
        index |= bit << (2 - q);
    }
    return index;
}

template <std::size_t K>
void validate_keep(const std::array<int, K> &keep) {
    for (std::size_t i = 0; i < K; ++i) {
        if (keep[i] < 0 || keep[i] > 2) {
            throw UsageError("partial trace: qubit index out of range");
        }
        if (i > 0 && keep[i] <= keep[i - 1]) {
            throw UsageError("partial trace: kept qubits must be distinct and increasing");
        }
    }
}

}  // namespace detail

/// Reduced density matrix of a three-qubit operator on the qubits in `keep`
/// (strictly increasing subset of {0, 1, 2}).
template <std::size_t K>
CMatrix<(1U << K), (1U << K)> partial_trace(const Mat8 &rho, const std::array<int, K> &keep) {
    static_assert(K >= 1 && K <= 3, "partial trace must keep between one and three qubits");
    detail::validate_keep(keep);
    constexpr std::size_t kept_dim = 1U << K;
    constexpr std::size_t traced_dim = 1U << (3 - K);
    CMatrix<kept_dim, kept_dim> out;
    for (std::size_t a = 0; a < kept_dim; ++a) {
        for (std::size_t b = 0; b < kept_dim; ++b) {
            Complex s = 0.0;
            for (std::size_t r = 0; r < traced_dim; ++r) {
                s += rho(detail::compose_index(keep, a, r), detail::compose_index(keep, b, r));
            }
            out(a, b) = s;
        }
    }
    return out;
}

/// Reduced density matrix of the pure state |psi><psi| without forming the
/// 8x8 projector.
template <std::size_t K>
CMatrix<(1U << K), (1U << K)> reduced_density(std::span<const Complex, 8> psi, const std::array<int, K> &keep) {
    static_assert(K >= 1 && K <= 3, "partial trace must keep between one and three qubits");
    detail::validate_keep(keep);
    constexpr std::size_t kept_dim = 1U << K;
    constexpr std::size_t traced_dim = 1U << (3 - K);
    CMatrix<kept_dim, kept_dim> out;
    for (std::size_t a = 0; a < kept_dim; ++a) {
        for (std::size_t b = a; b < kept_dim; ++b) {
            Complex s = 0.0;
            for (std::size_t r = 0; r < traced_dim; ++r) {
                s += psi[detail::compose_index(keep, a, r)] * std::conj(psi[detail::compose_index(keep, b, r)]);
            }
            out(a, b) = s;
            out(b, a) = std::conj(s);
        }
    }
    return out;
}

/// Real eigenvalues in non-increasing order.
template <std::size_t N>
struct HermSpectrum {
    std::array<double, N> eigenvalues{};

    [[nodiscard]] double sum() const {
        double s = 0.0;
        for (double x : eigenvalues) {
            s += x;
        }
        return s;
    }
};

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
T conj_if(const T &x) {
    if constexpr (is_complex<T>::value) {
        return std::conj(x);
    } else {
        return x;
    }
}

template <class T>
double real_part(const T &x) {
    if constexpr (is_complex<T>::value) {
        return x.real();
    } else {
        return x;
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian (or real symmetric) n x n
/// matrix stored row-major in `a`. On return the diagonal of `a` holds the
/// eigenvalues (unsorted); if `vecs` is non-null its columns hold the
/// corresponding orthonormal eigenvectors.
template <class T>
void jacobi_diagonalize(std::vector<T> &a, std::size_t n, std::vector<T> *vecs) {
    if (vecs != nullptr) {
        vecs->assign(n * n, T{0});
        for (std::size_t i = 0; i < n; ++i) {
            (*vecs)[i * n + i] = T{1};
        }
    }
    double total = 0.0;
    for (const T &x : a) {
        total += std::norm(std::complex<double>(x));
    }
    if (!std::isfinite(total)) {
        throw NumericalError("eigensolver: non-finite matrix entries");
    }
    const double threshold = 1e-32 * total;
    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::norm(std::complex<double>(a[p * n + q]));
            }
        }
        if (off <= threshold) {
            return;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const T apq = a[p * n + q];
                const double mag = std::abs(apq);
                if (mag == 0.0) {
                    continue;
                }
                const T phase = apq / mag;
                const double app = real_part(a[p * n + p]);
                const double aqq = real_part(a[q * n + q]);
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // J = [[c, s*phase], [-s*conj(phase), c]] on the (p, q) plane; A <- J^H A J.
                const T sp = s * phase;
                const T spc = s * conj_if(phase);
                for (std::size_t k = 0; k < n; ++k) {
                    const T akp = a[k * n + p];
                    const T akq = a[k * n + q];
                    a[k * n + p] = c * akp - spc * akq;
                    a[k * n + q] = sp * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const T apk = a[p * n + k];
                    const T aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sp * aqk;
                    a[q * n + k] = spc * apk + c * aqk;
                }
                a[p * n + q] = T{0};
                a[q * n + p] = T{0};
                a[p * n + p] = T{real_part(a[p * n + p])};
                a[q * n + q] = T{real_part(a[q * n + q])};
                if (vecs != nullptr) {
                    auto &v = *vecs;
                    for (std::size_t k = 0; k < n; ++k) {
                        const T vkp = v[k * n + p];
                        const T vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - spc * vkq;
                        v[k * n + q] = sp * vkp + c * vkq;
                    }
                }
            }
        }
    }
    throw NumericalError("eigensolver: Jacobi iteration did not converge");
}

}  // namespace detail

/// Eigenvalues of a real symmetric n x n matrix (row-major), non-increasing.
inline std::vector<double> symmetric_eigvals(std::span<const double> m, std::size_t n) {
    if (m.size() != n * n) {
        throw UsageError("symmetric_eigvals: matrix is not n x n");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m[i * n + j] - m[j * n + i]) > 1e-12) {
                throw NumericalError("symmetric_eigvals: matrix is not symmetric");
            }
        }
    }
    std::vector<double> a(m.begin(), m.end());
    detail::jacobi_diagonalize<double>(a, n, nullptr);
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) {
        ev[i] = a[i * n + i];
    }
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

template <std::size_t N>
struct HermEigen {
    HermSpectrum<N> spectrum;
    CMatrix<N, N> vectors;  // column k belongs to spectrum.eigenvalues[k]
};

template <std::size_t N>
HermEigen<N> herm_eigen(const CMatrix<N, N> &m) {
    if (!is_hermitian(m, 1e-10)) {
        throw NumericalError("herm_eigen: matrix is not Hermitian");
    }
    std::vector<Complex> a(m.entries().begin(), m.entries().end());
    std::vector<Complex> v;
    detail::jacobi_diagonalize(a, N, &v);
    std::array<std::size_t, N> order{};
    for (std::size_t i = 0; i < N; ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x * N + x].real() > a[y * N + y].real(); });
    HermEigen<N> out;
    for (std::size_t k = 0; k < N; ++k) {
        out.spectrum.eigenvalues[k] = a[order[k] * N + order[k]].real();
        for (std::size_t i = 0; i < N; ++i) {
            out.vectors(i, k) = v[i * N + order[k]];
        }
    }
    return out;
}

/// Eigenvalues of a 2x2 or 4x4 Hermitian matrix, non-increasing.
template <std::size_t N>
HermSpectrum<N> herm_eigvals(const CMatrix<N, N> &m) {
    static_assert(N == 2 || N == 4, "herm_eigvals supports 2x2 and 4x4 matrices");
    return herm_eigen(m).spectrum;
}

/// Eigenvalues of a density matrix within this much below zero are rounding
/// noise and are clamped to zero.
inline constexpr double kPsdSlack = 1e-9;

/// Eigenvalues of rho at or below this are rounding noise.
inline constexpr double kRankCutoff = 1e-14;

/// Square roots {alpha_k} of the eigenvalues of rho (Y(x)Y) rho* (Y(x)Y), in
/// non-increasing order. Computed through the Hermitian matrix
/// sqrt(rho) rho~ sqrt(rho), which has the same spectrum.
inline HermSpectrum<4> concurrence_alphas(const Mat4 &rho) {
    if (!is_hermitian(rho, 1e-10)) {
        throw NumericalError("concurrence_alphas: density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - 1.0) > kPsdSlack) {
        throw NumericalError("concurrence_alphas: density matrix does not have unit trace");
    }
    const HermEigen<4> eig = herm_eigen(rho);
    std::array<Complex, 4> root{};
    for (std::size_t k = 0; k < 4; ++k) {
        const double lambda = eig.spectrum.eigenvalues[k];
        if (lambda < -kPsdSlack) {
            throw NumericalError("concurrence_alphas: density matrix is not positive semidefinite");
        }
        // Rounding-level eigenvalues are treated as exact zeros, so rank-deficient
        // inputs (reduced states of pure three-qubit states) give exact zero alphas.
        root[k] = lambda > kRankCutoff ? std::sqrt(lambda) : 0.0;
    }
    // sqrt(rho) flipped sqrt(rho), written in the eigenbasis of rho.
    static const Mat4 yy = kron(pauli(2), pauli(2));
    const Mat4 flipped = yy * rho.conjugate() * yy;
    const Mat4 d = Mat4::diagonal(root);
    Mat4 r = d * (eig.vectors.adjoint() * flipped * eig.vectors) * d;
    // Symmetrize away rounding so the Hermitian solver accepts it.
    r = 0.5 * (r + r.adjoint());
    HermSpectrum<4> alphas = herm_eigvals(r);
    for (double &x : alphas.eigenvalues) {
        if (x < -kPsdSlack) {
            throw NumericalError("concurrence_alphas: negative eigenvalue in the spin-flipped product");
        }
        x = std::sqrt(std::max(x, 0.0));
    }
    return alphas;
}

}  // namespace rcm
