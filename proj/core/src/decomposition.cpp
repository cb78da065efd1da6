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

#include "conelab/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "conelab/error.hpp"
#include "conelab/parallel.hpp"
#include "conelab/rng.hpp"

namespace conelab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_gamma(double gamma)
{
    if (!(gamma > 0.0 && gamma <= std::numbers::pi))
    {
        throw DomainError("gamma must lie in (0, pi]");
    }
}

// Snap rounding noise so quarter-turn members are exact axis vectors.
double snap(double v) { return std::abs(v) < 1e-15 ? 0.0 : v; }

} // namespace

double DirectionSet::spacing() const noexcept { return kTwoPi / static_cast<double>(directions.size()); }

std::size_t DirectionSet::index_of(Vec2 omega) const
{
    const double phi = std::atan2(omega.y, omega.x);
    const auto n = static_cast<long long>(size());
    long long k = std::llround(phi / spacing());
    k = ((k % n) + n) % n;
    const auto idx = static_cast<std::size_t>(k);
    const Vec2 d = directions[idx] - omega;
    if (norm(d) > 1e-12)
    {
        throw DomainError("direction is not a member of Omega(gamma)");
    }
    return idx;
}

double DirectionSet::member_angle(std::size_t i, std::size_t j) const noexcept
{
    const std::size_t n = size();
    const std::size_t m = i > j ? i - j : j - i;
    return static_cast<double>(std::min(m, n - m)) * spacing();
}

std::vector<std::size_t> DirectionSet::covering(Vec2 xi) const
{
    std::vector<std::size_t> out;
    const double phi = std::atan2(xi.y, xi.x);
    const double s = spacing();
    const auto n = static_cast<long long>(size());
    const long long lo = static_cast<long long>(std::floor((phi - gamma) / s)) - 1;
    const long long hi = static_cast<long long>(std::ceil((phi + gamma) / s)) + 1;
    for (long long k = lo; k <= hi && k - lo < n; ++k)
    {
        const auto idx = static_cast<std::size_t>(((k % n) + n) % n);
        if (angle(xi, directions[idx]) <= gamma * (1.0 + 1e-12)
            && std::find(out.begin(), out.end(), idx) == out.end())
        {
            out.push_back(idx);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

DirectionSet omega_set(double gamma)
{
    require_gamma(gamma);
    const auto n = static_cast<std::size_t>(std::floor(kTwoPi / gamma));
    DirectionSet set{gamma, {}};
    set.directions.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const double a = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        Vec2 v{snap(std::cos(a)), snap(std::sin(a))};
        v = v * (1.0 / norm(v));
        set.directions.push_back(v);
    }
    return set;
}

namespace {

// Counting routines are called with few distinct angles but many points.
std::shared_ptr<const DirectionSet> shared_omega_set(double gamma)
{
    static std::mutex m;
    static std::map<std::uint64_t, std::shared_ptr<const DirectionSet>> cache;
    std::lock_guard lock(m);
    if (cache.size() > 256)
    {
        cache.clear();
    }
    auto& slot = cache[std::bit_cast<std::uint64_t>(gamma)];
    if (!slot)
    {
        slot = std::make_shared<const DirectionSet>(omega_set(gamma));
    }
    return slot;
}

} // namespace

std::vector<double> dyadic_angles(double gamma_min)
{
    if (!(gamma_min >= kMinDyadicAngle && gamma_min <= kMaxDyadicAngle))
    {
        throw DomainError("gamma_min must lie in [2^-12, 1/2]");
    }
    std::vector<double> out;
    for (double g = kMaxDyadicAngle; g >= gamma_min; g *= 0.5)
    {
        out.push_back(g);
    }
    return out;
}

int sector_cover_count(Vec2 xi, double gamma)
{
    if (xi == Vec2{})
    {
        throw DomainError("sector_cover_count: xi must be nonzero");
    }
    return static_cast<int>(shared_omega_set(gamma)->covering(xi).size());
}

int neighbor_count(Vec2 omega, int k, double gamma)
{
    if (k < 1)
    {
        throw DomainError("neighbor_count: k must be >= 1");
    }
    const auto held = shared_omega_set(gamma);
    const DirectionSet& set = *held;
    const std::size_t i = set.index_of(omega);
    int count = 0;
    for (std::size_t j = 0; j < set.size(); ++j)
    {
        count += set.member_angle(i, j) <= k * gamma ? 1 : 0;
    }
    return count;
}

std::vector<WhitneyPair> whitney_pairs(double gamma)
{
    const auto held = shared_omega_set(gamma);
    const DirectionSet& set = *held;
    std::vector<WhitneyPair> out;
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        for (std::size_t j = 0; j < set.size(); ++j)
        {
            const double t = set.member_angle(i, j);
            if (3.0 * gamma <= t && t <= 12.0 * gamma)
            {
                out.push_back({gamma, i, j, set.directions[i], set.directions[j]});
            }
        }
    }
    return out;
}

double whitney_sum(Vec2 xi1, Vec2 xi2, double gamma_min)
{
    if (xi1 == Vec2{} || xi2 == Vec2{})
    {
        throw DomainError("whitney_sum: xi1 and xi2 must be nonzero");
    }
    if (angle(xi1, xi2) < 24.0 * gamma_min)
    {
        throw DomainError("whitney_sum: requires angle(xi1, xi2) >= 24 gamma_min");
    }
    double total = 0.0;
    for (double g : dyadic_angles(gamma_min))
    {
        const auto held = shared_omega_set(g);
        const DirectionSet& set = *held;
        const auto c1 = set.covering(xi1);
        const auto c2 = set.covering(xi2);
        for (auto i : c1)
        {
            for (auto j : c2)
            {
                const double t = set.member_angle(i, j);
                total += (3.0 * g <= t && t <= 12.0 * g) ? 1.0 : 0.0;
            }
        }
    }
    return total;
}

int coarse_sector_cover(Vec2 xi1, Vec2 xi2, int k, double gamma)
{
    if (xi1 == Vec2{} || xi2 == Vec2{})
    {
        throw DomainError("coarse_sector_cover: xi must be nonzero");
    }
    if (k < 1 || angle(xi1, xi2) > k * gamma)
    {
        throw DomainError("coarse_sector_cover: requires angle(xi1, xi2) <= k gamma");
    }
    const auto held = shared_omega_set(gamma);
    const DirectionSet& set = *held;
    int count = 0;
    for (auto i : set.covering(xi1))
    {
        for (auto j : set.covering(xi2))
        {
            count += set.member_angle(i, j) <= (k + 2) * gamma ? 1 : 0;
        }
    }
    return count;
}

int nullplane_count(const FreqPoint& X, double d, double gamma, double N)
{
    const double r = norm(X.xi);
    if (!(N > 0.0) || r < N || r >= 2.0 * N)
    {
        throw DomainError("nullplane_count: requires N <= |xi| < 2N");
    }
    if (!(d > 0.0))
    {
        throw DomainError("nullplane_count: d must be positive");
    }
    const auto held = shared_omega_set(gamma);
    const DirectionSet& set = *held;
    int count = 0;
    for (const Vec2& w : set.directions)
    {
        count += std::abs(-X.tau + dot(X.xi, w)) <= d ? 1 : 0;
    }
    return count;
}

double nullplane_bound(double d, double gamma, double N, double K)
{
    return K * (1.0 + std::sqrt(d / (N * gamma * gamma)));
}

double coneplane_width(double N, double L, double gamma, double c)
{
    return c * std::max(L, N * gamma * gamma);
}

InclusionCheck cone_nullslab_check(Sign sign, double N, double L, double gamma, Vec2 omega, std::int64_t n,
                                   std::uint64_t seed, double c)
{
    // Validates the sector parameters.
    (void)Region::cone_sector(sign, N, L, gamma, omega);
    if (!std::isfinite(L))
    {
        throw DomainError("cone_nullslab_check: L must be finite");
    }
    const double width = coneplane_width(N, L, gamma, c);
    const double s = value(sign);
    const double phi0 = std::atan2(omega.y, omega.x);
    auto excess = [&](double rho, double t, double h) {
        const Vec2 xi = s * rho * unit_at(phi0 + t);
        const double tau = s * rho + h;
        return std::abs(-tau + dot(xi, omega)) - width;
    };
    InclusionCheck out;
    out.worst_excess = -std::numeric_limits<double>::infinity();
    // Extreme corners first: the outer rim at the angular edge is where the
    // slab condition is tightest. The rim 2N itself is excluded by the
    // half-open radial convention, so stay one ulp inside.
    const double rim = std::nextafter(2.0 * N, 0.0);
    for (double rho : {N, rim})
    {
        for (double t : {-gamma, 0.0, gamma})
        {
            for (double h : {-L, 0.0, L})
            {
                out.worst_excess = std::max(out.worst_excess, excess(rho, t, h));
                ++out.checked;
            }
        }
    }
    const CounterRng rng(seed);
    constexpr std::size_t chunk = 1 << 14;
    const auto count = static_cast<std::size_t>(std::max<std::int64_t>(0, n));
    std::vector<double> worst(chunk_count(count, chunk), -std::numeric_limits<double>::infinity());
    parallel_chunks(count, chunk, [&](std::size_t ci, std::size_t b, std::size_t e) {
        double w = -std::numeric_limits<double>::infinity();
        for (std::size_t i = b; i < e; ++i)
        {
            w = std::max(w, excess(rng.uniform(i, 0, N, 2.0 * N), rng.uniform(i, 1, -gamma, gamma),
                                   rng.uniform(i, 2, -L, L)));
        }
        worst[ci] = w;
    });
    for (double w : worst)
    {
        out.worst_excess = std::max(out.worst_excess, w);
    }
    out.checked += static_cast<std::int64_t>(count);
    out.inside = out.worst_excess <= 0.0;
    return out;
}

bool cone_nullslab_inclusion(Sign sign, double N, double L, double gamma, Vec2 omega, std::int64_t n,
                             std::uint64_t seed, double c)
{
    return cone_nullslab_check(sign, N, L, gamma, omega, n, seed, c).inside;
}

} // namespace conelab
