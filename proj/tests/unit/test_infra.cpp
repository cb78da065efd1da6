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

#include <atomic>
#include <cmath>
#include <set>

#include "conelab/error.hpp"
#include "conelab/parallel.hpp"
#include "conelab/region_json.hpp"
#include "conelab/rng.hpp"

using namespace conelab;

TEST_SUITE("infrastructure")
{
    TEST_CASE("counter rng is keyed by counter and lane")
    {
        const CounterRng a(1), b(1), c(2);
        CHECK(a.bits(5, 0) == b.bits(5, 0));
        CHECK(a.bits(5, 0) != a.bits(5, 1));
        CHECK(a.bits(5, 0) != c.bits(5, 0));
        double mean = 0;
        for (std::uint64_t i = 0; i < 100000; ++i)
        {
            const double u = a.uniform(i);
            CHECK_FALSE((u < 0.0 || u >= 1.0));
            mean += u;
        }
        CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
    }

    TEST_CASE("derived seeds separate task paths")
    {
        CHECK(derive_seed(42, "f1") != derive_seed(42, "f2"));
        CHECK(derive_seed(42, "f1") == derive_seed(42, "f1"));
        CHECK(derive_seed(42, std::uint64_t{3}) != derive_seed(43, std::uint64_t{3}));
    }

    TEST_CASE("parallel loops visit every index once")
    {
        const int before = thread_count();
        for (int t : {1, 3})
        {
            set_thread_count(t);
            std::vector<std::atomic<int>> hits(1000);
            parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
            for (auto& h : hits)
            {
                CHECK(h.load() == 1);
            }
            std::vector<std::size_t> seen(chunk_count(1000, 64), 0);
            parallel_chunks(1000, 64, [&](std::size_t c, std::size_t b, std::size_t e) { seen[c] = e - b; });
            std::size_t total = 0;
            for (auto s : seen)
            {
                total += s;
            }
            CHECK(total == 1000);
        }
        set_thread_count(before);
        CHECK(chunk_count(0, 8) == 0);
        CHECK(chunk_count(9, 8) == 2);
    }

    TEST_CASE("regions round trip through json")
    {
        const Region R = Region::intersect(
            {Region::cone_sector(Sign::Minus, 2, 0.1, 0.3, unit_at(1.0)),
             Region::translate({1, {0.5, -0.5}}, Region::reflect(Region::null_slab(0.2, {0, 1}))),
             Region::spatial_strip(0.4, {1, 0}), Region::slab({0, 1}, {-1, 1}),
             Region::spatial_ball({0, 0}, 3), Region::cone_ball(Sign::Plus, 1, 0.5),
             Region::cone_annulus(Sign::Plus, 1, std::numeric_limits<double>::infinity())});
        const nlohmann::json j = to_json(R);
        const Region S = region_from_json(j);
        CHECK(to_json(S) == j);
        CHECK_THROWS_AS(region_from_json(nlohmann::json::parse(R"({"type":"torus"})")), ParseError);
        CHECK_THROWS_AS(region_from_json(nlohmann::json::parse(R"({"type":"cone_ball","sign":1})")), ParseError);
    }

    TEST_CASE("params and boxes round trip through json")
    {
        DyadicParams p;
        p.N = {0.5, 1, 2};
        p.L = {std::numeric_limits<double>::infinity(), 0.125, 0.25};
        p.signs = {Sign::Minus, Sign::Plus, Sign::Minus};
        const DyadicParams q = params_from_json(to_json(p));
        CHECK(q.N == p.N);
        CHECK(std::isinf(q.L[0]));
        CHECK(q.signs == p.signs);
        const Box b{{0, 1}, {-1, 2}, {3, 4}};
        CHECK(box_from_json(to_json(b)) == b);
        CHECK(real_from_json(real_to_json(std::numeric_limits<double>::infinity())) > 1e308);
    }
}
