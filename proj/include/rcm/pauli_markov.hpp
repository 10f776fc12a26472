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

// Markov chain for the Haar-averaged squared Pauli coefficients of a
// three-qubit state. Write rho = sum_a c_a P_a over Pauli strings
// P_a = s^{a0} (x) s^{a1} (x) s^{a2}, a_i in {0, x, y, z} -> {0, 1, 2, 3}.
// A Haar-random U(4) on qubits (i, j) keeps the label pair (0, 0) on those
// qubits and spreads the squared weight of any other label pair uniformly
// over the 15 non-identity pairs. Averaging over the two couplings gives a
// 64 x 64 column-stochastic M with c^2(t+1) = M c^2(t).
//
// Weights use the orthonormal basis P_a / sqrt(8): w_a = Tr[rho P_a]^2 / 8,
// so sum_a w_a = Tr rho^2 and the system purity is 4 * sum_{a0} w_{a0,0,0}.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "rcm/collision.hpp"
#include "rcm/errors.hpp"
#include "rcm/qlinalg.hpp"
#include "rcm/state.hpp"

namespace rcm {

constexpr std::size_t pauli_index(int a0, int a1, int a2) {
    return static_cast<std::size_t>(16 * a0 + 4 * a1 + a2);
}

struct PauliWeightVector {
    std::array<double, 64> w{};

    double &operator[](std::size_t i) { return w[i]; }
    double operator[](std::size_t i) const { return w[i]; }

    [[nodiscard]] double total() const {
        double s = 0.0;
        for (double x : w) {
            s += x;
        }
        return s;
    }
};

/// 64 x 64 real matrix, m(i, j) = weight moved from label j to label i.
class MixingMatrix {
   public:
    static constexpr std::size_t dim = 64;

    MixingMatrix() : m_(dim * dim, 0.0) {}

    double &operator()(std::size_t i, std::size_t j) { return m_[i * dim + j]; }
    double operator()(std::size_t i, std::size_t j) const { return m_[i * dim + j]; }

    [[nodiscard]] std::span<const double> data() const { return m_; }

    [[nodiscard]] PauliWeightVector apply(const PauliWeightVector &v) const {
        PauliWeightVector out;
        for (std::size_t i = 0; i < dim; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                s += m_[i * dim + j] * v[j];
            }
            out[i] = s;
        }
        return out;
    }

    /// Largest |column sum - 1| (0 for an exactly stochastic matrix).
    [[nodiscard]] double stochasticity_error() const {
        double worst = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                s += m_[i * dim + j];
            }
            worst = std::max(worst, std::abs(s - 1.0));
        }
        return worst;
    }

    friend MixingMatrix operator+(const MixingMatrix &a, const MixingMatrix &b) {
        MixingMatrix out;
        for (std::size_t k = 0; k < dim * dim; ++k) {
            out.m_[k] = a.m_[k] + b.m_[k];
        }
        return out;
    }
    friend MixingMatrix operator*(double s, const MixingMatrix &a) {
        MixingMatrix out;
        for (std::size_t k = 0; k < dim * dim; ++k) {
            out.m_[k] = s * a.m_[k];
        }
        return out;
    }

   private:
    std::vector<double> m_;
};

/// Transition matrix of one Haar-random collision on the given pair.
inline MixingMatrix pair_mixer(Pair pair) {
    const int partner = pair == Pair::p01 ? 1 : 2;
    MixingMatrix m;
    for (int a0 = 0; a0 < 4; ++a0) {
        for (int a1 = 0; a1 < 4; ++a1) {
            for (int a2 = 0; a2 < 4; ++a2) {
                const std::size_t from = pauli_index(a0, a1, a2);
                const int spectator = partner == 1 ? a2 : a1;
                const int ap = partner == 1 ? a1 : a2;
                if (a0 == 0 && ap == 0) {
                    m(from, from) = 1.0;
                    continue;
                }
                for (int b0 = 0; b0 < 4; ++b0) {
                    for (int bp = 0; bp < 4; ++bp) {
                        if (b0 == 0 && bp == 0) {
                            continue;
                        }
                        const std::size_t to =
                            partner == 1 ? pauli_index(b0, bp, spectator) : pauli_index(b0, spectator, bp);
                        m(to, from) = 1.0 / 15.0;
                    }
                }
            }
        }
    }
    return m;
}

/// M = (M_01 + M_02) / 2: the coupled pair is chosen uniformly each step.
inline MixingMatrix build_m() { return 0.5 * (pair_mixer(Pair::p01) + pair_mixer(Pair::p02)); }

/// All 64 eigenvalues, non-increasing. M is symmetric (each pair mixer is
/// identity (+) J/15 on its labels), so a symmetric Jacobi solve applies;
/// non-symmetric input is rejected.
inline std::vector<double> spectrum(const MixingMatrix &m) { return symmetric_eigvals(m.data(), MixingMatrix::dim); }

struct EigenCluster {
    double value = 0.0;
    int multiplicity = 0;
};

/// Groups a non-increasing eigenvalue list into clusters closer than `tol`.
inline std::vector<EigenCluster> cluster_eigenvalues(std::span<const double> sorted, double tol = 1e-8) {
    std::vector<EigenCluster> out;
    for (double v : sorted) {
        if (!out.empty() && std::abs(out.back().value - v) < tol) {
            auto &c = out.back();
            c.value = (c.value * c.multiplicity + v) / (c.multiplicity + 1);
            ++c.multiplicity;
        } else {
            out.push_back({v, 1});
        }
    }
    return out;
}

/// Second-largest distinct eigenvalue 1 - Delta of the chain.
inline double second_eigenvalue(const MixingMatrix &m) {
    const auto ev = spectrum(m);
    const auto clusters = cluster_eigenvalues(ev);
    if (clusters.size() < 2) {
        throw NumericalError("spectrum has a single eigenvalue cluster; no gap");
    }
    return clusters[1].value;
}

/// Asymptotic relaxation rate -ln(1 - Delta).
inline double decay_rate(const MixingMatrix &m) {
    const double second = second_eigenvalue(m);
    if (second <= 0.0) {
        throw NumericalError("second eigenvalue is not positive; decay rate undefined");
    }
    return -std::log(second);
}

/// Tr[rho P_a] for the pure state s and every Pauli string a.
inline std::array<double, 64> pauli_expectations(const StateVector &s) {
    using namespace std::complex_literals;
    std::array<double, 64> out{};
    for (int a0 = 0; a0 < 4; ++a0) {
        for (int a1 = 0; a1 < 4; ++a1) {
            for (int a2 = 0; a2 < 4; ++a2) {
                const int labels[3] = {a0, a1, a2};
                Complex acc = 0.0;
                for (std::size_t i = 0; i < 8; ++i) {
                    // P|i> = phase |i ^ flip>.
                    std::size_t flip = 0;
                    Complex phase = 1.0;
                    for (int q = 0; q < 3; ++q) {
                        const std::size_t shift = static_cast<std::size_t>(2 - q);
                        const bool bit = ((i >> shift) & 1U) != 0;
                        switch (labels[q]) {
                            case 1:
                                flip |= std::size_t{1} << shift;
                                break;
                            case 2:
                                flip |= std::size_t{1} << shift;
                                phase *= bit ? -1.0i : 1.0i;
                                break;
                            case 3:
                                if (bit) {
                                    phase = -phase;
                                }
                                break;
                            default:
                                break;
                        }
                    }
                    acc += std::conj(s[i ^ flip]) * phase * s[i];
                }
                out[pauli_index(a0, a1, a2)] = acc.real();
            }
        }
    }
    return out;
}

inline PauliWeightVector weights_from_state(const StateVector &s) {
    const auto e = pauli_expectations(s);
    PauliWeightVector w;
    for (std::size_t i = 0; i < 64; ++i) {
        w[i] = e[i] * e[i] / 8.0;
    }
    return w;
}

/// System-qubit purity read off a weight vector.
inline double purity_from_weights(const PauliWeightVector &w) {
    double s = 0.0;
    for (int a0 = 0; a0 < 4; ++a0) {
        s += w[pauli_index(a0, 0, 0)];
    }
    return 4.0 * s;
}

/// Ensemble-averaged purity for t = 0..t_max, iterating w <- M w.
inline std::vector<double> predict_purity(const PauliWeightVector &w0, int t_max) {
    if (t_max < 0) {
        throw UsageError("predict_purity: t_max must be non-negative");
    }
    const MixingMatrix m = build_m();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(t_max) + 1);
    PauliWeightVector w = w0;
    out.push_back(purity_from_weights(w));
    for (int t = 1; t <= t_max; ++t) {
        w = m.apply(w);
        out.push_back(purity_from_weights(w));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lumped chain over supports

/// Support of a Pauli label as a 3-bit mask; qubit 0 is the most significant
/// bit, as for basis indices.
constexpr std::size_t support_of(std::size_t label) {
    const std::size_t a0 = label / 16;
    const std::size_t a1 = (label / 4) % 4;
    const std::size_t a2 = label % 4;
    return (a0 != 0 ? 4U : 0U) | (a1 != 0 ? 2U : 0U) | (a2 != 0 ? 1U : 0U);
}

/// Number of Pauli labels with a given support, 3^|S|.
constexpr double support_class_size(std::size_t support) {
    double n = 1.0;
    for (std::size_t b = 0; b < 3; ++b) {
        if ((support >> b) & 1U) {
            n *= 3.0;
        }
    }
    return n;
}

/// 8 x 8 column-stochastic chain on supports S of {0, 1, 2}, row-major with
/// entry (S', S) = probability S -> S'. A collision on (i, j) leaves S alone
/// when it misses {i, j}; otherwise the {i, j} part becomes {i}, {j} or
/// {i, j} with probabilities 3/15, 3/15, 9/15.
inline std::array<double, 64> lump_by_support() {
    std::array<double, 64> l{};
    const std::size_t bit0 = 4U;
    for (std::size_t partner_bit : {2U, 1U}) {
        const std::size_t pair_mask = bit0 | partner_bit;
        for (std::size_t s = 0; s < 8; ++s) {
            if ((s & pair_mask) == 0) {
                l[s * 8 + s] += 0.5;
                continue;
            }
            const std::size_t rest = s & ~pair_mask;
            l[(rest | bit0) * 8 + s] += 0.5 * 0.2;
            l[(rest | partner_bit) * 8 + s] += 0.5 * 0.2;
            l[(rest | pair_mask) * 8 + s] += 0.5 * 0.6;
        }
    }
    return l;
}

/// Sums weights over labels of equal support.
inline std::array<double, 8> lump_weights(const PauliWeightVector &w) {
    std::array<double, 8> out{};
    for (std::size_t i = 0; i < 64; ++i) {
        out[support_of(i)] += w[i];
    }
    return out;
}

/// Eigenvalues of a chain that is reversible with respect to `weights`
/// (a[i,j] w[j] == a[j,i] w[i]), via the symmetric matrix
/// W^{-1/2} A W^{1/2}.
inline std::vector<double> reversible_spectrum(std::span<const double> a, std::size_t n,
                                               std::span<const double> weights) {
    if (a.size() != n * n || weights.size() != n) {
        throw UsageError("reversible_spectrum: size mismatch");
    }
    std::vector<double> sym(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sym[i * n + j] = a[i * n + j] * std::sqrt(weights[j] / weights[i]);
        }
    }
    return symmetric_eigvals(sym, n);
}

inline std::vector<double> lumped_spectrum() {
    const auto l = lump_by_support();
    std::array<double, 8> sizes{};
    for (std::size_t s = 0; s < 8; ++s) {
        sizes[s] = support_class_size(s);
    }
    return reversible_spectrum(l, 8, sizes);
}

}  // namespace rcm
