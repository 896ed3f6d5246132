// SPDX-License-Identifier: Apache-2.0
//
// mmfsk - multimodal frequency-shift-keying MIMO radar depth imaging
// Copyright (C) 2026 The mmfsk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMFSK_RANDOM_HPP
#define MMFSK_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <utility>

namespace mmfsk
{
    // Counter-based random numbers: every draw is a pure function of
    // (seed, stream, counter), so results never depend on call order or
    // thread scheduling and are identical on every platform.
    //
    // Algorithm: SplitMix64 finalizer over a keyed counter, 53-bit uniforms,
    // Box-Muller for normals. Recorded in run metadata as kRandomAlgorithm.
    inline constexpr const char *kRandomAlgorithm = "splitmix64-counter/box-muller";

    constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t random_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
    {
        return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
    }

    // Uniform in (0, 1); never returns 0 so it is safe under log().
    constexpr double uniform_open(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
    {
        return (double(random_bits(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Two independent standard normals.
    inline std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                                 std::uint64_t counter) noexcept
    {
        const double u1 = uniform_open(seed, stream, 2 * counter);
        const double u2 = uniform_open(seed, stream, 2 * counter + 1);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    // Streams keep unrelated consumers of one seed apart.
    namespace rng_stream
    {
        inline constexpr std::uint64_t noise = 1;
        inline constexpr std::uint64_t scene = 2;
        inline constexpr std::uint64_t prior = 3;
        inline constexpr std::uint64_t camera = 4;
        inline constexpr std::uint64_t experiment = 5;
    } // namespace rng_stream

} // namespace mmfsk

#endif
