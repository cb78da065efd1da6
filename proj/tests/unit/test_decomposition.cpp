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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conelab/decomposition.hpp"
#include "conelab/error.hpp"
#include "conelab/rng.hpp"
#include "conelab/verify.hpp"

using namespace conelab;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent enumeration: members of Ω(γ) within γ of xi.
std::vector<double> covering_angles(Vec2 xi, double gamma)
{
    const int n = static_cast<int>(std::floor(2 * kPi / gamma));
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
    {
        const double a = 2 * kPi * i / n;
        if (angle(xi, unit_at(a)) <= gamma + 1e-12)
        {
            out.push_back(a);
        }
    }
    return out;
}

double circ_dist(double a, double b)
{
    const double d = std::fmod(std::abs(a - b), 2 * kPi);
    return std::min(d, 2 * kPi - d);
}

} // namespace

TEST_SUITE("decomposition")
{
    TEST_CASE("direction sets")
    {
        CHECK(omega_set(kPi).size() == 2);
        CHECK(omega_set(kPi / 2).size() == 4);
        CHECK(omega_set(0.1).size() == 62);
        const DirectionSet s = omega_set(0.1);
        CHECK(s.spacing() >= 0.1);
        CHECK(s.directions.front().x == doctest::Approx(1.0));
        CHECK(s.index_of(s.directions[7]) == 7);
        CHECK(s.member_angle(0, 31) == doctest::Approx(31 * s.spacing()));
        CHECK_THROWS_AS(s.index_of(unit_at(0.05)), DomainError);
    }

    TEST_CASE("dyadic angles")
    {
        const auto a = dyadic_angles(0x1.0p-5);
        REQUIRE(a.size() == 5);
        CHECK(a.front() == 0.5);
        CHECK(a.back() == 0x1.0p-5);
        CHECK(dyadic_angles(0.3).size() == 1);
        CHECK_THROWS_AS(dyadic_angles(0x1.0p-13), DomainError);
    }

    TEST_CASE("sector cover counts")
    {
        CHECK(sector_cover_count({1, 0}, kPi / 2) == 3);
        const CounterRng rng(5);
        for (std::uint64_t i = 0; i < 2000; ++i)
        {
            const Vec2 xi = unit_at(rng.uniform(i, 0, 0, 2 * kPi)) * rng.uniform(i, 1, 0.1, 10);
            const double g = std::ldexp(1.0, -1 - static_cast<int>(i % 12));
            const int c = sector_cover_count(xi, g);
            CHECK(c >= 1);
            CHECK(c <= 5);
            CHECK(c == static_cast<int>(covering_angles(xi, g).size()));
        }
        CHECK_THROWS_AS(sector_cover_count({0, 0}, 0.1), DomainError);
    }

    TEST_CASE("neighbour counts")
    {
        CHECK(neighbor_count({1, 0}, 1, kPi / 2) == 3);
        const DirectionSet s = omega_set(0.05);
        for (int k = 1; k <= 16; ++k)
        {
            CHECK(neighbor_count(s.directions[3], k, 0.05) <= 2 * k + 1);
        }
        CHECK(neighbor_count(s.directions[3], 1, 0.05) <= 3);
        const double g = 0.3;
        const int n = static_cast<int>(omega_set(g).size());
        CHECK(neighbor_count({1, 0}, 11, g) == n);
        CHECK(2 * 11 + 1 >= n);
        CHECK_THROWS_AS(neighbor_count({1, 0}, 0, g), DomainError);
    }

    TEST_CASE("whitney pairs and sums")
    {
        for (const auto& wp : whitney_pairs(0.125))
        {
            const double t = angle(wp.omega1, wp.omega2);
            CHECK(t >= 3 * 0.125 - 1e-12);
            CHECK(t <= 12 * 0.125 + 1e-12);
        }
        const double s = whitney_sum({1, 0}, {0, 1}, 0x1.0p-8);
        CHECK(s >= 1);
        CHECK(s <= kWhitneyBound);
        CHECK_THROWS_AS(whitney_sum({1, 0}, {1, 0}, 0x1.0p-8), DomainError);
        CHECK_THROWS_AS(whitney_sum({1, 0}, unit_at(0.01), 0x1.0p-8), DomainError);
    }

    TEST_CASE("coarse sector cover")
    {
        CHECK(coarse_sector_cover({1, 0}, {1, 0}, 1, 0.1) >= 1);

        const double g = kPi / 4;
        const Vec2 a{1, 0}, b{1, 0.1};
        int expect = 0;
        for (double u : covering_angles(a, g))
        {
            for (double v : covering_angles(b, g))
            {
                expect += circ_dist(u, v) <= 4 * g + 1e-12 ? 1 : 0;
            }
        }
        CHECK(coarse_sector_cover(a, b, 2, g) == expect);

        const CounterRng rng(11);
        for (std::uint64_t i = 0; i < 500; ++i)
        {
            const int k = 1 + static_cast<int>(i % 16);
            const double gg = std::ldexp(1.0, -3 - static_cast<int>(i % 6));
            const double t0 = rng.uniform(i, 0, 0, 2 * kPi);
            const Vec2 x1 = unit_at(t0);
            const Vec2 x2 = unit_at(t0 + rng.uniform(i, 1, -1, 1) * k * gg) * 3.0;
            CHECK(coarse_sector_cover(x1, x2, k, gg) <= 5 * (2 * (k + 2) + 1));
        }
        CHECK_THROWS_AS(coarse_sector_cover({1, 0}, {-1, 0}, 1, 0.1), DomainError);
    }

    TEST_CASE("null plane counts")
    {
        CHECK(nullplane_count({100, {1.5, 0}}, 0.5, 0.05, 1) == 0);
        const int all = static_cast<int>(omega_set(0.05).size());
        CHECK(nullplane_count({0, {1.5, 0}}, 2.0, 0.05, 1) == all);
        CHECK(nullplane_bound(2.0, 0.05, 1) >= all);

        const FreqPoint X{1, {1, 0}};
        int expect = 0;
        for (const Vec2& w : omega_set(0.05).directions)
        {
            expect += std::abs(-1 + w.x) <= 0.01 ? 1 : 0;
        }
        CHECK(nullplane_count(X, 0.01, 0.05, 1) == expect);
        CHECK(expect <= nullplane_bound(0.01, 0.05, 1));
        CHECK(nullplane_bound(0.01, 0.05, 1) == doctest::Approx(24.0));
        CHECK_THROWS_AS(nullplane_count({0, {0.5, 0}}, 0.1, 0.05, 1), DomainError);
    }

    TEST_CASE("cone sectors sit in null slabs")
    {
        CHECK(coneplane_width(1, 0.001, 0.1) == doctest::Approx(kConePlaneConstant * 0.01));
        CHECK(cone_nullslab_inclusion(Sign::Plus, 1, 0.001, 0.1, {1, 0}, 100000, 42));
        CHECK(cone_nullslab_inclusion(Sign::Minus, 1, 0.001, 0.1, unit_at(1.0), 20000, 43));
        CHECK(cone_nullslab_inclusion(Sign::Plus, 1, 0.01, 1e-4, {0, 1}, 20000, 44));
        CHECK_FALSE(cone_nullslab_inclusion(Sign::Plus, 1, 0.001, 0.1, {1, 0}, 100000, 42,
                                            0.5 * kConePlaneConstant));
        const InclusionCheck c = cone_nullslab_check(Sign::Plus, 1, 0.001, 0.1, {1, 0}, 1000, 1);
        CHECK(c.inside);
        CHECK(c.checked >= 1000);
        CHECK(c.worst_excess <= 0.0);
    }
}
