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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

#include "rcm/errors.hpp"

namespace rcm {

/// Master seed of a simulation. Identical seeds give bit-identical streams.
struct Seed {
    std::uint64_t master = 0;

    friend bool operator==(const Seed &, const Seed &) = default;
};

/// Parses a 64-bit seed written in decimal or with a 0x hex prefix.
inline Seed parse_seed(std::string_view text) {
    std::string s(text);
    if (s.empty()) {
        throw UsageError("empty seed");
    }
    int base = 10;
    std::size_t offset = 0;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        offset = 2;
    }
    std::uint64_t value = 0;
    for (std::size_t i = offset; i < s.size(); ++i) {
        char c = s[i];
        unsigned digit;
        if (c >= '0' && c <= '9') {
            digit = static_cast<unsigned>(c - '0');
        } else if (base == 16 && c >= 'a' && c <= 'f') {
            digit = static_cast<unsigned>(c - 'a' + 10);
        } else if (base == 16 && c >= 'A' && c <= 'F') {
            digit = static_cast<unsigned>(c - 'A' + 10);
        } else {
            throw UsageError("invalid seed '" + s + "'");
        }
        if (value > (UINT64_MAX - digit) / static_cast<unsigned>(base)) {
            throw UsageError("seed '" + s + "' does not fit in 64 bits");
        }
        value = value * static_cast<unsigned>(base) + digit;
    }
    return Seed{value};
}

/// SplitMix64 finalizer; used to decorrelate child-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// A single random stream. The engine output of std::mt19937_64 is fixed by
/// the standard; the conversions to uniform and normal variates are done
/// here rather than through <random> distributions, whose algorithms vary
/// between standard library implementations. Streams are therefore
/// reproducible across toolchains.
///
/// Trajectory k of an ensemble draws from `RandomStream(seed).child(k)`, so
/// results do not depend on how trajectories are scheduled.
class RandomStream {
   public:
    explicit RandomStream(Seed seed) : seed_(seed.master), engine_(splitmix64(seed.master)) {}

    /// Independent stream derived deterministically from (this seed, index).
    [[nodiscard]] RandomStream child(std::uint64_t index) const {
        return RandomStream(Seed{splitmix64(seed_ ^ splitmix64(index + 0x632BE59BD9B4E019ULL))});
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal variate (Box-Muller, one value per call).
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

   private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace rcm
