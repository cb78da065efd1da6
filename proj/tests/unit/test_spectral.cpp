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
#include <filesystem>
#include <limits>
#include <numbers>

#include "conelab/error.hpp"
#include "conelab/rng.hpp"
#include "conelab/spectral.hpp"
#include "conelab/volume.hpp"

using namespace conelab;

namespace {

constexpr double kPi = std::numbers::pi;

Region everything() { return Region::spatial_ball({0, 0}, std::numeric_limits<double>::max()); }

GridFunction random_on(const Region& R, const Lattice& lat, std::uint64_t seed)
{
    GridFunction f = indicator_function(R, lat);
    const CounterRng rng(seed);
    for (std::size_t i = 0; i < f.values.size(); ++i)
    {
        if (f.mask[i])
        {
            f.values[i] = {rng.normal(i, 0), rng.normal(i, 1)};
        }
    }
    return f;
}

} // namespace

TEST_SUITE("spectral")
{
    TEST_CASE("lattice construction")
    {
        const Lattice u = make_lattice({{0, 1}, {0, 1}, {0, 1}}, {8, 8, 8});
        CHECK(u.h[0] == doctest::Approx(0.125));
        CHECK(u.h[2] == doctest::Approx(0.125));
        const Lattice a = make_lattice({{0, 2}, {-2, 2}, {-2, 2}}, {16, 32, 32});
        for (double h : a.h)
        {
            CHECK(h == doctest::Approx(0.125));
        }
        CHECK_THROWS_AS(make_lattice({{0, 0}, {0, 1}, {0, 1}}, {8, 8, 8}), DomainError);
        CHECK_THROWS_AS(make_lattice({{0, 1}, {0, 1}, {0, 1}}, {4, 8, 8}), DomainError);
        const auto m = a.unravel(a.index(3, 5, 7));
        CHECK(m == std::array<int, 3>{3, 5, 7});
        CHECK(a.center(a.index(3, 5, 7)).tau == doctest::Approx(a.center(3, 5, 7).tau));
    }

    TEST_CASE("lattices with a common spacing share cell centres")
    {
        const std::array<double, 3> h{0.1, 0.1, 0.1};
        const Lattice a = lattice_with_spacing({{0.03, 1}, {0, 1}, {0, 1}}, h);
        const Lattice b = lattice_with_spacing({{2.07, 3}, {-1, 0}, {0, 1}}, h);
        CHECK(a.same_spacing(b));
        const double k = (b.lo[0] - a.lo[0]) / h[0];
        CHECK(k == doctest::Approx(std::round(k)));
    }

    TEST_CASE("indicator functions")
    {
        const Box b{{0, 1}, {0, 1}, {0, 1}};
        const Lattice lat = make_lattice(b, {8, 8, 8});
        CHECK(indicator_function(Region::box(b), lat).support_size() == lat.size());
        CHECK(indicator_function(Region::box({{5, 6}, {0, 1}, {0, 1}}), lat).support_size() == 0);

        const Region ann = Region::cone_annulus(Sign::Plus, 1, 0.1);
        const Lattice fine = make_lattice(bounding_box(ann), {128, 128, 128});
        const GridFunction f = indicator_function(ann, fine);
        const double raster = f.support_size() * fine.cell_volume();
        const double exact = 2 * 0.1 * kPi * 3.0;
        CHECK(raster == doctest::Approx(exact).epsilon(0.1));
        CHECK_NOTHROW(f.check_invariants());
    }

    TEST_CASE("invariants reject values off the mask")
    {
        const Lattice lat = make_lattice({{0, 1}, {0, 1}, {0, 1}}, {8, 8, 8});
        GridFunction f = GridFunction::zeros(lat);
        f.values[3] = 1.0;
        CHECK_THROWS_AS(f.check_invariants(), DomainError);
    }

    TEST_CASE("l2 norm")
    {
        const Lattice lat = make_lattice({{0, 8}, {0, 8}, {0, 8}}, {8, 8, 8});
        GridFunction f = GridFunction::zeros(lat);
        CHECK(l2_norm(f) == 0.0);
        f.values[10] = 1.0;
        f.mask[10] = 1;
        CHECK(l2_norm(f) == doctest::Approx(1.0));
        f.values[10] = {0, -3};
        CHECK(l2_norm(f) == doctest::Approx(3.0));
    }

    TEST_CASE("convolution with a discrete delta shifts")
    {
        const Lattice lat = make_lattice({{0, 1}, {0, 1}, {0, 1}}, {8, 8, 8});
        GridFunction delta = GridFunction::zeros(lat);
        delta.values[lat.index(0, 0, 0)] = 1.0 / lat.cell_volume();
        delta.mask[lat.index(0, 0, 0)] = 1;
        const GridFunction f = random_on(Region::box({{0.2, 0.7}, {0.1, 0.5}, {0.3, 0.9}}), lat, 3);
        const GridFunction g = convolve(delta, f, ConvolutionMethod::Direct);
        const FreqPoint c0 = lat.center(0, 0, 0);
        for (std::size_t i = 0; i < f.values.size(); ++i)
        {
            if (!f.mask[i])
            {
                continue;
            }
            const auto m = lat.unravel(i);
            const std::size_t o = g.lattice.index(m[0], m[1], m[2]);
            CHECK(std::abs(g.values[o] - f.values[i]) < 1e-12);
            CHECK(g.lattice.center(o).tau == doctest::Approx(lat.center(i).tau + c0.tau));
        }
    }

    TEST_CASE("convolution of boxes is a tent")
    {
        const Box b{{0, 1}, {0, 1}, {0, 1}};
        const Lattice lat = make_lattice(b, {8, 8, 8});
        const GridFunction one = indicator_function(Region::box(b), lat);
        const GridFunction g = convolve(one, one, ConvolutionMethod::Direct);
        // Peak at the centre of the sum box: overlap volume 1 at zero shift.
        const std::size_t peak = g.lattice.index(7, 7, 7);
        CHECK(g.values[peak].real() == doctest::Approx(1.0));
        CHECK(g.values[g.lattice.index(0, 0, 0)].real() == doctest::Approx(std::pow(1.0 / 8, 3)));
        // Direct and FFT agree.
        const GridFunction h = convolve(one, one, ConvolutionMethod::Fft);
        double err = 0;
        for (std::size_t i = 0; i < g.values.size(); ++i)
        {
            err = std::max(err, std::abs(g.values[i] - h.values[i]));
        }
        CHECK(err < 1e-12);
    }

    TEST_CASE("fft and direct convolution agree on random inputs")
    {
        const Region ann = Region::cone_annulus(Sign::Plus, 1, 0.25);
        const Lattice lat = make_lattice(bounding_box(ann), {16, 16, 16});
        const GridFunction f1 = random_on(ann, lat, 1);
        const GridFunction f2 = random_on(ann, lat, 2);
        const GridFunction a = convolve(f1, f2, ConvolutionMethod::Direct);
        const GridFunction b = convolve(f1, f2, ConvolutionMethod::Fft);
        CHECK(l2_norm(a) > 0);
        double err = 0;
        for (std::size_t i = 0; i < a.values.size(); ++i)
        {
            err = std::max(err, std::abs(a.values[i] - b.values[i]));
        }
        CHECK(err < 1e-10 * l2_norm(a));
    }

    TEST_CASE("restricted product norm")
    {
        const Region ann = Region::cone_annulus(Sign::Plus, 1, 0.25);
        const Lattice lat = make_lattice(bounding_box(ann), {16, 16, 16});
        const GridFunction f1 = random_on(ann, lat, 4);
        const GridFunction f2 = random_on(ann, lat, 5);
        CHECK(restricted_product_norm(f1, f2, everything()) == doctest::Approx(l2_norm(convolve(f1, f2))));
        CHECK(restricted_product_norm(f1, f2, Region::spatial_ball({100, 100}, 1)) == 0.0);
        const double part = restricted_product_norm(f1, f2, Region::cone_ball(Sign::Plus, 2, 0.5));
        CHECK(part <= restricted_product_norm(f1, f2, everything()));
    }

    TEST_CASE("reflection, shift and resampling")
    {
        const Box b{{0, 1}, {0, 1}, {0, 1}};
        const Lattice lat = make_lattice(b, {8, 8, 8});
        const GridFunction f = random_on(Region::box({{0.1, 0.6}, {0, 1}, {0.2, 0.4}}), lat, 8);
        const GridFunction r = reflect_conj(f);
        CHECK(l2_norm(r) == doctest::Approx(l2_norm(f)));
        CHECK(r.lattice.lo[0] == doctest::Approx(-1.0));
        const GridFunction s = shift(f, {2, 0, -1});
        CHECK(s.lattice.lo[0] == doctest::Approx(0.25));
        const GridFunction back = resample_aligned(s, lat);
        CHECK(l2_norm(back) <= l2_norm(f) + 1e-12);
    }

    TEST_CASE("slab energies")
    {
        const Box b{{0, 1}, {0, 1}, {0, 1}};
        const Lattice lat = make_lattice(b, {8, 8, 8});
        const GridFunction one = indicator_function(Region::box(b), lat);
        CHECK(max_slab_energy(one, {1, 0}, 2.0) == doctest::Approx(1.0));
        CHECK(max_slab_energy(one, {1, 0}, 0.0) == doctest::Approx(1.0 / 8));
        CHECK(restricted_energy(one, Region::slab({1, 0}, {0, 0.5})) == doctest::Approx(0.5));
    }

    TEST_CASE("null form weights")
    {
        // Cells on the positive xi1 axis: theta12 vanishes on the support.
        Lattice lat;
        lat.lo = {0.5, 0.5, -0.0625};
        lat.h = {0.125, 0.125, 0.125};
        lat.dims = {8, 8, 8};
        GridFunction f = GridFunction::zeros(lat);
        for (int i0 = 0; i0 < 8; ++i0)
        {
            for (int i1 = 0; i1 < 8; ++i1)
            {
                f.values[lat.index(i0, i1, 0)] = 1.0;
                f.mask[lat.index(i0, i1, 0)] = 1;
            }
        }
        CHECK(nullform_direct(f, f, Sign::Plus, Sign::Plus, everything()) == 0.0);

        const Region ann = Region::cone_annulus(Sign::Plus, 1, 0.25);
        const Lattice l2 = make_lattice(bounding_box(ann), {12, 12, 12});
        const GridFunction g1 = random_on(ann, l2, 6);
        const GridFunction g2 = random_on(ann, l2, 7);
        for (Sign s2 : {Sign::Plus, Sign::Minus})
        {
            const double nf = nullform_direct(g1, g2, Sign::Plus, s2, everything());
            const double pn = restricted_product_norm(g1, g2, everything());
            CHECK(nf > 0);
            CHECK(nf <= kPi * pn);
            const double ns = nullform_direct(g1, g2, Sign::Plus, s2, everything(), NullFormPower::IndicatorSmall);
            CHECK(ns <= kSmallAngleCutoff * pn * (1 + 1e-12));
        }
    }

    TEST_CASE("separated sectors carry their angle")
    {
        const double theta = 1.0;
        const Region a = Region::cone_sector(Sign::Plus, 1, 0.25, 0.02, {1, 0});
        const Region b = Region::cone_sector(Sign::Plus, 1, 0.25, 0.02, unit_at(theta));
        const Box box = bounding_box(Region::cone_annulus(Sign::Plus, 1, 0.25));
        const Lattice lat = make_lattice(box, {16, 64, 64});
        const GridFunction f1 = indicator_function(a, lat);
        const GridFunction f2 = indicator_function(b, lat);
        REQUIRE(f1.support_size() > 0);
        REQUIRE(f2.support_size() > 0);
        const double pn = restricted_product_norm(f1, f2, everything());
        const double direct = nullform_direct(f1, f2, Sign::Plus, Sign::Plus, everything());
        const double gmin = std::exp2(std::ceil(std::log2(angular_resolution(f1, f2))));
        const double sect = nullform_sectored(f1, f2, Sign::Plus, Sign::Plus, everything(), gmin);
        CHECK(direct == doctest::Approx(theta * pn).epsilon(0.3));
        CHECK(sect == doctest::Approx(theta * pn).epsilon(0.3));
    }

    TEST_CASE("anisotropic norm")
    {
        const double N = 1, r = 0.25;
        const Region ann = Region::cone_annulus(Sign::Plus, N, 0.25);
        const Lattice lat = make_lattice(bounding_box(ann), {8, 64, 64});
        GridFunction zero = GridFunction::zeros(lat);
        CHECK(anisotropic_norm(zero, N, r) == 0.0);

        const GridFunction tube =
            indicator_function(Region::intersect({ann, Region::spatial_strip(r, {1, 0})}), lat);
        REQUIRE(tube.support_size() > 0);
        CHECK(anisotropic_norm(tube, N, r) == doctest::Approx(std::sqrt(N / r) * l2_norm(tube)));

        const GridFunction round = indicator_function(ann, lat);
        const double q = anisotropic_norm(round, N, r) / l2_norm(round);
        CHECK(q >= 0.25);
        CHECK(q <= 4.0);
        CHECK_THROWS_AS(anisotropic_norm(round, N, 2 * N), DomainError);
    }

    TEST_CASE("packets")
    {
        PacketSpec cap{PacketKind::KnappCap, Sign::Plus, 1, 0.01, {1, 0}, std::nullopt, std::nullopt};
        const auto& sec = std::get<shape::ConeSector>(packet_region(cap).shape());
        CHECK(sec.gamma == doctest::Approx(0.1));

        const Region R = packet_region(cap);
        const Lattice lat = make_lattice(bounding_box(R), {512, 16, 16});
        const GridFunction f = knapp_packet(cap, lat);
        CHECK(f.support_size() > 0);
        CHECK(l2_norm(f) * l2_norm(f) == doctest::Approx(f.support_size() * lat.cell_volume()));

        // A tube as wide as the annulus is the plain indicator.
        PacketSpec wide{PacketKind::NullRay, Sign::Minus, 1, 0.1, {0, 1}, std::nullopt, kPi};
        PacketSpec ind{PacketKind::Indicator, Sign::Minus, 1, 0.1, {0, 1}, std::nullopt, std::nullopt};
        const Lattice l2 = make_lattice(bounding_box(packet_region(ind)), {64, 16, 16});
        CHECK(knapp_packet(wide, l2).mask == knapp_packet(ind, l2).mask);

        const Lattice coarse = make_lattice(bounding_box(R), {8, 8, 8});
        CHECK_THROWS_AS(knapp_packet(cap, coarse), ResolutionError);
        const Lattice clipped = make_lattice({{0, 2.5}, {1.2, 1.5}, {-1, 1}}, {1024, 8, 8});
        CHECK_THROWS_AS(knapp_packet(cap, clipped), DomainError);
    }

    TEST_CASE("grid function persistence round trip")
    {
        const Lattice lat = make_lattice({{0, 1}, {0, 1}, {0, 1}}, {8, 8, 8});
        const GridFunction f = random_on(Region::box({{0, 0.5}, {0, 1}, {0, 1}}), lat, 12);
        const auto dir = std::filesystem::temp_directory_path() / "conelab_unit_grid";
        std::filesystem::create_directories(dir);
        const std::string prefix = (dir / "f").string();
        export_grid_function(f, prefix, {{"note", "unit"}});
        const GridFunction g = import_grid_function(prefix);
        CHECK(g.lattice.dims == f.lattice.dims);
        CHECK(g.mask == f.mask);
        // Values are stored as complex64.
        double err = 0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
        {
            err = std::max(err, std::abs(f.values[i] - g.values[i]));
        }
        CHECK(err < 1e-5);
        const Lattice back = lattice_from_json(to_json(lat));
        CHECK(back.h == lat.h);
        std::filesystem::remove_all(dir);
    }
}
