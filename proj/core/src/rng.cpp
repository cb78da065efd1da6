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

#include "conelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace conelab {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view path) noexcept
{
    // FNV-1a over the path, then mixed with the parent seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : path)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(seed ^ mix64(h));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    return mix64(seed + mix64(index ^ 0x5851f42d4c957f2dULL));
}

double CounterRng::normal(std::uint64_t counter, std::uint32_t lane) const noexcept
{
    // 1 - u keeps the logarithm finite.
    const double u1 = 1.0 - uniform(counter, 2 * lane);
    const double u2 = uniform(counter, 2 * lane + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace conelab
