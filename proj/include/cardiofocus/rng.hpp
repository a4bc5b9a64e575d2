// SPDX-License-Identifier: Apache-2.0
//
// cardiofocus: cardiac-point focusing, tracking and sparse heartbeat
// recovery for FMCW radar data cubes.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <cmath>
#include <utility>

namespace cardiofocus {

// Counter-based randomness: every draw is a pure function of
// (seed, stream, counter), so parallel loops produce the same bytes as the
// serial reference no matter how iterations are scheduled.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

// Uniform in (0, 1); never returns 0 so it is safe inside log().
inline double hash_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const std::uint64_t bits = hash_combine(seed, stream, counter);
    return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

// One Box-Muller pair per counter value.
inline std::pair<double, double> hash_gaussian2(std::uint64_t seed, std::uint64_t stream,
                                                std::uint64_t counter) {
    const double u1 = hash_uniform(seed, stream, 2 * counter);
    const double u2 = hash_uniform(seed, stream, 2 * counter + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace cardiofocus
