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
#include <vector>

#include "conelab/geometry.hpp"

namespace conelab {

/// Maximal gamma-separated subset of the unit circle, realized as n = floor(2π/γ)
/// equally spaced directions starting at (1, 0).
struct DirectionSet
{
    double gamma = 0.0;
    std::vector<Vec2> directions;

    std::size_t size() const noexcept { return directions.size(); }
    double spacing() const noexcept;
    /// Index of a member direction (tolerance 1e-12); DomainError if absent.
    std::size_t index_of(Vec2 omega) const;
    /// Angle between members i and j from index arithmetic.
    double member_angle(std::size_t i, std::size_t j) const noexcept;
    /// Members within angle gamma of xi (closed boundary).
    std::vector<std::size_t> covering(Vec2 xi) const;
};

DirectionSet omega_set(double gamma);

/// Dyadic angles 2^-1, 2^-2, ... down to the smallest one >= gamma_min.
std::vector<double> dyadic_angles(double gamma_min);
inline constexpr double kMinDyadicAngle = 0x1.0p-12;
inline constexpr double kMaxDyadicAngle = 0.5;

int sector_cover_count(Vec2 xi, double gamma);

int neighbor_count(Vec2 omega, int k, double gamma);

struct WhitneyPair
{
    double gamma;
    std::size_t i1;
    std::size_t i2;
    Vec2 omega1;
    Vec2 omega2;
};

/// All ordered pairs of Ω(gamma) with 3γ <= θ(ω1, ω2) <= 12γ.
std::vector<WhitneyPair> whitney_pairs(double gamma);

/// Number of (γ, ω1, ω2) Whitney cells containing (xi1, xi2), γ dyadic in
/// [gamma_min, 1/2]. Requires angle(xi1, xi2) >= 24 gamma_min.
double whitney_sum(Vec2 xi1, Vec2 xi2, double gamma_min);

int coarse_sector_cover(Vec2 xi1, Vec2 xi2, int k, double gamma);

/// #{ω in Ω(γ) : |−τ + ξ·ω| <= d} for N <= |ξ| < 2N.
int nullplane_count(const FreqPoint& X, double d, double gamma, double N);

/// K (1 + (d / (N γ²))^{1/2}).
double nullplane_bound(double d, double gamma, double N, double K = 8.0);

/// Certified factor c in K̇^±_{N,L,γ}(ω) ⊂ H_{c max(L, Nγ²)}(ω) for the
/// membership conventions of geometry.hpp.
inline constexpr double kConePlaneConstant = 2.0;

double coneplane_width(double N, double L, double gamma, double c = kConePlaneConstant);

struct InclusionCheck
{
    bool inside = true;
    std::int64_t checked = 0;
    double worst_excess = 0.0; ///< max of |−τ + ξ·ω| − width over checked points
};

/// Samples n points of the sector (plus its extreme corners) and tests them
/// against the null slab of width c max(L, Nγ²).
InclusionCheck cone_nullslab_check(Sign sign, double N, double L, double gamma, Vec2 omega, std::int64_t n,
                                   std::uint64_t seed, double c = kConePlaneConstant);

bool cone_nullslab_inclusion(Sign sign, double N, double L, double gamma, Vec2 omega, std::int64_t n,
                             std::uint64_t seed, double c = kConePlaneConstant);

} // namespace conelab
