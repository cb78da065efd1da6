/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <string_view>

namespace conelab {

/// SplitMix64 finalizer; a bijective avalanche mix of 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Sub-seed for a named task, so every consumer of randomness can be keyed
/// from one top-level seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view path) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/**
 * Counter-based generator: the value for (counter, lane) is a pure function
 * of the key, so a sample drawn by any thread in any order is the same.
 */
class CounterRng
{
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    constexpr std::uint64_t bits(std::uint64_t counter, std::uint32_t lane = 0) const noexcept
    {
        return mix64(mix64(seed_ ^ mix64(counter)) + 0xd1b54a32d192ed03ULL * (lane + 1));
    }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter, std::uint32_t lane = 0) const noexcept
    {
        return static_cast<double>(bits(counter, lane) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t counter, std::uint32_t lane, double lo, double hi) const noexcept
    {
        return lo + (hi - lo) * uniform(counter, lane);
    }

    /// Standard normal via Box-Muller on lanes (2*lane, 2*lane+1).
    double normal(std::uint64_t counter, std::uint32_t lane = 0) const noexcept;

    constexpr std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

} // namespace conelab
