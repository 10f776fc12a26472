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

// Repeated random collisions of the system qubit (0) with the two
// environment qubits (1, 2). Each collision is a U(4) acting on the pair
// (0, 1) or (0, 2); the three-qubit state is kept as a pure state vector.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/haar.hpp"
#include "rcm/observables.hpp"
#include "rcm/qlinalg.hpp"
#include "rcm/random.hpp"
#include "rcm/state.hpp"

namespace rcm {

enum class Pair { p01, p02 };

inline std::string_view to_string(Pair p) { return p == Pair::p01 ? "01" : "02"; }

inline Pair parse_pair(std::string_view text) {
    if (text == "01") {
        return Pair::p01;
    }
    if (text == "02") {
        return Pair::p02;
    }
    throw UsageError("unknown collision pair '" + std::string(text) + "' (valid: 01, 02)");
}

/// Which environment qubit collides at each step.
class CollisionPolicy {
   public:
    enum class Kind { random, alternating, fixed };

    static CollisionPolicy random() { return CollisionPolicy(Kind::random, {}); }
    static CollisionPolicy alternating() { return CollisionPolicy(Kind::alternating, {}); }
    /// The sequence is repeated cyclically when a run is longer than it.
    static CollisionPolicy fixed(std::vector<Pair> sequence) {
        if (sequence.empty()) {
            throw UsageError("fixed collision policy needs a non-empty sequence");
        }
        return CollisionPolicy(Kind::fixed, std::move(sequence));
    }

    /// "random", "alternating", or a whitespace/comma separated list of pairs.
    static CollisionPolicy parse(std::string_view text) {
        if (text == "random") {
            return random();
        }
        if (text == "alternating") {
            return alternating();
        }
        std::vector<Pair> seq;
        std::string token;
        auto flush = [&] {
            if (!token.empty()) {
                seq.push_back(parse_pair(token));
                token.clear();
            }
        };
        for (char c : text) {
            if (c == ' ' || c == ',' || c == '\n' || c == '\t' || c == '\r') {
                flush();
            } else {
                token.push_back(c);
            }
        }
        flush();
        if (seq.empty()) {
            throw UsageError("policy must be random, alternating, or a list of pairs (01/02)");
        }
        return fixed(std::move(seq));
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const std::vector<Pair> &sequence() const { return sequence_; }

    /// Pair for collision number `index` (0-based). Only the random policy
    /// consumes randomness.
    Pair pair_at(std::size_t index, RandomStream &rng) const {
        switch (kind_) {
            case Kind::random:
                return rng.uniform() < 0.5 ? Pair::p01 : Pair::p02;
            case Kind::alternating:
                return index % 2 == 0 ? Pair::p01 : Pair::p02;
            case Kind::fixed:
                return sequence_[index % sequence_.size()];
        }
        return Pair::p01;
    }

    [[nodiscard]] std::string to_string() const {
        switch (kind_) {
            case Kind::random:
                return "random";
            case Kind::alternating:
                return "alternating";
            case Kind::fixed:
                break;
        }
        std::string out;
        for (std::size_t i = 0; i < sequence_.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += rcm::to_string(sequence_[i]);
        }
        return out;
    }

   private:
    CollisionPolicy(Kind kind, std::vector<Pair> seq) : kind_(kind), sequence_(std::move(seq)) {}

    Kind kind_;
    std::vector<Pair> sequence_;
};

/// The 8x8 operator of a collision: U (x) I for pair 01, and for pair 02 the
/// same operator conjugated by the permutation swapping qubits 1 and 2.
inline Mat8 embed_pair(const Unitary4 &u, Pair pair) {
    const Mat8 on01 = kron(u.matrix(), Mat2::identity());
    if (pair == Pair::p01) {
        return on01;
    }
    Mat8 swap12;
    for (std::size_t i = 0; i < 8; ++i) {
        const std::size_t q1 = (i >> 1) & 1U;
        const std::size_t q2 = i & 1U;
        swap12((i & 4U) | (q2 << 1) | q1, i) = 1.0;
    }
    return swap12 * on01 * swap12;
}

/// One collision applied directly to the amplitudes; equal to
/// embed_pair(u, pair) * s.
inline StateVector step(const StateVector &s, const Unitary4 &u, Pair pair) {
    const auto in = s.amplitudes();
    std::array<Complex, 8> out{};
    // Basis index of (pair index a = 2*q0 + qe, spectator bit).
    auto index = [pair](std::size_t a, std::size_t spectator) {
        const std::size_t q0 = a >> 1;
        const std::size_t qe = a & 1U;
        return pair == Pair::p01 ? (q0 << 2) | (qe << 1) | spectator : (q0 << 2) | (spectator << 1) | qe;
    };
    for (std::size_t spectator = 0; spectator < 2; ++spectator) {
        for (std::size_t a = 0; a < 4; ++a) {
            Complex acc = 0.0;
            for (std::size_t b = 0; b < 4; ++b) {
                acc += u(a, b) * in[index(b, spectator)];
            }
            out[index(a, spectator)] = acc;
        }
    }
    return StateVector::from_drifting(out);
}

/// Parses "(re,im) (re,im) ..." with exactly eight amplitudes. Input within
/// 1e-6 of unit norm is renormalized; anything further off is rejected.
inline StateVector parse_state_literal(std::string_view text) {
    std::array<Complex, 8> amps{};
    std::size_t count = 0;
    std::size_t pos = 0;
    auto parse_double = [&](std::string_view field) {
        while (!field.empty() && field.front() == ' ') {
            field.remove_prefix(1);
        }
        while (!field.empty() && field.back() == ' ') {
            field.remove_suffix(1);
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            throw UsageError("state literal: cannot parse number '" + std::string(field) + "'");
        }
        if (!std::isfinite(v)) {
            throw UsageError("state literal: non-finite amplitude");
        }
        return v;
    };
    while (true) {
        const auto open = text.find('(', pos);
        if (open == std::string_view::npos) {
            break;
        }
        const auto close = text.find(')', open);
        if (close == std::string_view::npos) {
            throw UsageError("state literal: unbalanced parenthesis");
        }
        const auto inner = text.substr(open + 1, close - open - 1);
        const auto comma = inner.find(',');
        if (comma == std::string_view::npos) {
            throw UsageError("state literal: amplitude must be written (re,im)");
        }
        if (count == 8) {
            throw UsageError("state literal: more than 8 amplitudes");
        }
        amps[count++] = Complex(parse_double(inner.substr(0, comma)), parse_double(inner.substr(comma + 1)));
        pos = close + 1;
    }
    if (count != 8) {
        throw UsageError("state literal: expected 8 amplitudes, got " + std::to_string(count));
    }
    double n2 = 0.0;
    for (const auto &a : amps) {
        n2 += std::norm(a);
    }
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-6) {
        throw UsageError("state literal: norm " + std::to_string(std::sqrt(n2)) + " is not within 1e-6 of 1");
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto &a : amps) {
        a *= inv;
    }
    return StateVector::from_drifting(amps);
}

/// Inverse of parse_state_literal, with enough digits to round-trip.
inline std::string format_state_literal(const StateVector &s) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < 8; ++i) {
        if (i > 0) {
            out << ' ';
        }
        out << '(' << s[i].real() << ',' << s[i].imag() << ')';
    }
    return out.str();
}

/// "product" -> |0>|00>, "entangled" -> |0>(|00> + |11>)/sqrt2, or an
/// explicit amplitude literal.
inline StateVector named_initial(std::string_view label) {
    if (label == "product") {
        return StateVector();
    }
    if (label == "entangled") {
        std::array<Complex, 8> a{};
        a[0] = std::sqrt(0.5);
        a[3] = std::sqrt(0.5);
        return StateVector::from_drifting(a);
    }
    if (label.find('(') != std::string_view::npos) {
        return parse_state_literal(label);
    }
    throw UsageError("unknown initial state '" + std::string(label) +
                     "' (valid: product, entangled, or 8 amplitudes \"(re,im) ...\")");
}

struct Trajectory {
    std::vector<ObservableRecord> records;  // t = 0..steps
    Seed seed;
    CollisionPolicy policy = CollisionPolicy::random();
    std::string initial_state_label;
    StateVector final_state;
};

/// Applies `steps` collisions and records observables at every t, t = 0
/// included. Per collision the pair is drawn first (random policy only),
/// then the unitary.
inline Trajectory run_trajectory(const StateVector &initial, const CollisionPolicy &policy, int steps,
                                 RandomStream &rng, Sampler sampler = Sampler::hurwitz,
                                 std::string initial_label = "") {
    if (steps < 0) {
        throw UsageError("steps must be non-negative");
    }
    Trajectory traj;
    traj.seed = Seed{rng.seed()};
    traj.policy = policy;
    traj.initial_state_label = std::move(initial_label);
    traj.records.reserve(static_cast<std::size_t>(steps) + 1);
    StateVector s = initial;
    traj.records.push_back(record(s, 0));
    for (int t = 1; t <= steps; ++t) {
        const Pair pair = policy.pair_at(static_cast<std::size_t>(t - 1), rng);
        const Unitary4 u = sample_unitary(sampler, rng);
        s = step(s, u, pair);
        traj.records.push_back(record(s, t));
    }
    traj.final_state = s;
    return traj;
}

}  // namespace rcm
