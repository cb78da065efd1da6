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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "conelab/error.hpp"
#include "conelab/estimates.hpp"
#include "conelab/volume.hpp"

using namespace conelab;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();

DyadicParams params(std::array<double, 3> N, std::array<double, 3> L,
                    std::array<Sign, 3> s = {Sign::Plus, Sign::Plus, Sign::Plus})
{
    DyadicParams p;
    p.N = N;
    p.L = L;
    p.signs = s;
    return p;
}

Extras extras_for(EstimateId id)
{
    Extras e;
    for (const auto& k : required_extras(id))
    {
        e[k] = k == "alpha" ? 0.1 : (k == "gamma" ? 0.05 : (k == "I_len" ? 0.8 : 0.1));
    }
    return e;
}

} // namespace

TEST_SUITE("estimates")
{
    TEST_CASE("catalog names round trip")
    {
        for (EstimateId id : all_estimate_ids())
        {
            CHECK(estimate_id_from_string(to_string(id)) == id);
        }
        CHECK(all_estimate_ids().size() == 18);
        CHECK_THROWS_AS(estimate_id_from_string("KM_X"), ParseError);
        CHECK(is_sector_id(EstimateId::SECTOR_J220));
        CHECK_FALSE(is_sector_id(EstimateId::LOWOUT_L1));
        CHECK(is_product_id(EstimateId::KM_A112_J2));
        CHECK_FALSE(is_product_id(EstimateId::L4_2D));
    }

    TEST_CASE("predicted constants")
    {
        CHECK(predicted_constant(EstimateId::KM_A110, params({1, 1, 1}, {kInf, 0.01, 0.04}), {})
              == doctest::Approx(0.1 * std::pow(0.04, 0.25)));
        CHECK(predicted_constant(EstimateId::KM_A110, params({1, 1, 1}, {kInf, 0.01, 0.04}), {})
              == doctest::Approx(0.04472).epsilon(1e-3));
        CHECK(predicted_constant(EstimateId::KM_A116, params({1, 1, 1}, {0.01, 0.02, 0.03}), {})
              == doctest::Approx(0.1));
        CHECK(predicted_constant(EstimateId::NULL_N2, params({1, 1, 1}, {kInf, 0.01, 0.01}), {{"r", 0.1}})
              == doctest::Approx(3.162e-3).epsilon(1e-3));
        CHECK(predicted_constant(EstimateId::L4_2D, params({1, 2, 1}, {kInf, 0.5, 0.1}), {})
              == doctest::Approx(1.0));
    }

    TEST_CASE("missing extras are reported")
    {
        try
        {
            predicted_constant(EstimateId::CONC_N4, params({1, 1, 1}, {kInf, 0.1, 0.1}), {{"r", 0.1}});
            FAIL("expected DomainError");
        }
        catch (const DomainError& e)
        {
            CHECK(std::string(e.what()).find("I_len") != std::string::npos);
        }
        CHECK_THROWS_AS(predicted_constant(EstimateId::NULL_N2, params({1, 1, 1}, {kInf, 0.1, 0.1}), {{"r", -1}}),
                        DomainError);
        CHECK_THROWS_AS(predicted_constant(EstimateId::LOWOUT_L1, params({1, 1, 1}, {kInf, 0.1, 0.1}), {}),
                        DomainError);
    }

    TEST_CASE("scaling covariance of every predicted constant")
    {
        const DyadicParams base = params({0.25, 1, 2}, {0.5, 0.125, 0.25});
        for (EstimateId id : all_estimate_ids())
        {
            const Extras e = extras_for(id);
            const double c = predicted_constant(id, base, e);
            for (double lam : {2.0, 4.0})
            {
                DyadicParams p = base;
                Extras f = e;
                for (int j = 0; j < 3; ++j)
                {
                    p.N[j] *= lam;
                    p.L[j] *= lam;
                }
                for (auto& [k, v] : f)
                {
                    if (is_length_extra(k))
                    {
                        v *= lam;
                    }
                }
                CAPTURE(to_string(id));
                CHECK(predicted_constant(id, p, f) == doctest::Approx(std::pow(lam, homogeneity_degree(id)) * c));
            }
        }
    }

    TEST_CASE("strategy compatibility")
    {
        CHECK_NOTHROW(check_strategy(EstimateId::LOWOUT_L1, Strategy::NullRay));
        CHECK_THROWS_AS(check_strategy(EstimateId::KM_A110, Strategy::NullRay), DomainError);
        CHECK_THROWS_AS(check_strategy(EstimateId::SECTOR_E20, Strategy::Random), DomainError);
        CHECK_NOTHROW(check_strategy(EstimateId::SECTOR_E20, Strategy::VolumeRoute));
        CHECK_THROWS_AS(check_strategy(EstimateId::L4_2D, Strategy::VolumeRoute), DomainError);
        for (Strategy s : {Strategy::Random, Strategy::Knapp, Strategy::NullRay, Strategy::PowerIter,
                           Strategy::VolumeRoute})
        {
            CHECK(strategy_from_string(to_string(s)) == s);
        }
        CHECK(is_extremizer(Strategy::Knapp));
        CHECK_FALSE(is_extremizer(Strategy::Random));
    }

    TEST_CASE("empirical constants on the lattice")
    {
        const DyadicParams p = params({2, 1, 1}, {kInf, 0.25, 0.25});
        const RatioReport a = empirical_constant(EstimateId::KM_A110, p, {}, Strategy::Random, {64, 32, 32}, 42);
        const RatioReport b = empirical_constant(EstimateId::KM_A110, p, {}, Strategy::Random, {64, 32, 32}, 42);
        CHECK(a.empirical > 0);
        CHECK(a.empirical == b.empirical);
        CHECK(a.ratio == doctest::Approx(a.empirical / a.predicted));
        const RatioReport k = empirical_constant(EstimateId::KM_A110, p, {}, Strategy::Knapp, {64, 32, 32}, 42);
        CHECK(k.ratio > a.ratio);
        const RatioReport pi = empirical_constant(EstimateId::KM_A110, p, {}, Strategy::PowerIter, {48, 16, 16}, 42);
        const RatioReport rs = empirical_constant(EstimateId::KM_A110, p, {}, Strategy::Random, {48, 16, 16}, 42);
        CHECK(pi.empirical >= rs.empirical);
        CHECK_THROWS_AS(empirical_constant(EstimateId::KM_A110, params({2, 1, 1}, {kInf, 0.01, 0.25}), {},
                                           Strategy::Random, {16, 16, 16}, 42),
                        ResolutionError);
    }

    TEST_CASE("null-ray packets are a sharpness witness for the low output estimate")
    {
        const DyadicParams p = params({0.125, 1, 1}, {0.125, 0.125, 0.125}, {Sign::Plus, Sign::Plus, Sign::Minus});
        const RatioReport r = empirical_constant(EstimateId::LOWOUT_L1, p, {}, Strategy::NullRay, {64, 64, 64}, 42);
        CHECK(r.extras.count("r") == 1);
        CHECK(r.ratio > 1e-2);
    }

    TEST_CASE("volume route estimate")
    {
        const DyadicParams p = params({1, 1, 1}, {kInf, 0.01, 0.04});
        const RatioReport r = empirical_constant(EstimateId::KM_A110, p, {}, Strategy::VolumeRoute, {8, 8, 8}, 1);
        CHECK(r.empirical == doctest::Approx(bilinear_constant_volume(p).constant));
        CHECK(r.dims == std::array<int, 3>{0, 0, 0});
        CHECK(r.ratio <= 8.0);
    }

    TEST_CASE("power iteration is monotone")
    {
        const Region A1 = Region::cone_annulus(Sign::Plus, 1, 0.25);
        const Region A2 = Region::cone_annulus(Sign::Minus, 1, 0.25);
        const Region A0 = Region::cone_ball(Sign::Plus, 2, 0.5);
        Box b = bounding_box(A1);
        const Box b2 = bounding_box(A2);
        b.tau = {std::min(b.tau.lo, b2.tau.lo), std::max(b.tau.hi, b2.tau.hi)};
        const Lattice lat = make_lattice(b, {16, 16, 16});
        std::vector<double> hist;
        const double v = power_iteration_bilinear(A0, A1, A2, lat, 8, 3, &hist);
        REQUIRE(hist.size() >= 2);
        for (std::size_t i = 1; i < hist.size(); ++i)
        {
            CHECK(hist[i] >= hist[i - 1] * (1 - 1e-12));
        }
        CHECK(v == hist.back());

        const Region far = Region::translate({100, {0, 0}}, A0);
        CHECK(power_iteration_bilinear(far, A1, A2, lat, 4, 3) == 0.0);
        CHECK_THROWS_AS(power_iteration_bilinear(A0, A1, A2, lat, 1, 3), DomainError);
    }

    TEST_CASE("power iteration on one cell matches the closed form")
    {
        // Single cells of volume v: |f1 * f2| = v |a b| on one output cell,
        // so the quotient is v^{1/2}.
        const Lattice lat = make_lattice({{0, 1}, {0, 1}, {0, 1}}, {8, 8, 8});
        const Box cell{{0, 0.125}, {0, 0.125}, {0, 0.125}};
        const Region A = Region::box(cell);
        const Region A0 = Region::box({{0, 0.25}, {0, 0.25}, {0, 0.25}});
        const double v = power_iteration_bilinear(A0, A, A, lat, 4, 1);
        CHECK(v == doctest::Approx(std::sqrt(lat.cell_volume())));
    }

    TEST_CASE("angle lemma pointwise")
    {
        const AngleLemmaResult r =
            angle_lemma_check({1, {1, 0}}, {1, {0, 1}}, Sign::Plus, Sign::Plus, Sign::Plus);
        CHECK(r.lhs == doctest::Approx(2 - std::sqrt(2.0)));
        CHECK(r.rhs == doctest::Approx(kPi * kPi / 4));
        CHECK(r.ratio == doctest::Approx(0.2374).epsilon(1e-3));
        const AngleLemmaResult z =
            angle_lemma_check({1, {1, 0}}, {2, {2, 0}}, Sign::Plus, Sign::Plus, Sign::Plus);
        CHECK(z.rhs == 0.0);
        CHECK(std::isinf(z.ratio));
    }

    TEST_CASE("conic curvature")
    {
        for (double th : {0.0, 0.7, 2.0, 3.0})
        {
            CHECK(conic_curvature(2, 0, Conic::Ellipse, th) == doctest::Approx(0.5));
            CHECK(conic_radius(2, 0, Conic::Ellipse, th) == doctest::Approx(2.0));
        }
        double worst = 0;
        for (int k = 0; k < 100; ++k)
        {
            const double th = 2 * kPi * (k + 0.5) / 100;
            const double a = conic_curvature(2, 1, Conic::Ellipse, th);
            worst = std::max(worst, std::abs(conic_curvature_numeric(2, 1, Conic::Ellipse, th) - a) / a);
        }
        CHECK(worst <= kCurvatureRelTol);

        // Hyperbola branch with foci 0 and (4, 0), N1 around 8.
        const CurvatureResult h = curvature_check(1.0, 2.0, Conic::Hyperbola, {-0.3, 0.3}, 0.1, 8.0);
        CHECK(h.samples > 0);
        CHECK(h.max_rel_err <= kCurvatureRelTol);
        CHECK(h.kappa_max <= 8.0 / h.N1_proxy);
        CHECK_THROWS_AS(curvature_check(1, 2, Conic::Hyperbola, {0, 0.1}, 0.1, 0), DomainError);
        CHECK(to_string(Conic::Ellipse) == "ellipse");
    }

    TEST_CASE("gradient flow identity")
    {
        const GradientFlowResult axis = gradient_flow_identity({0.3, 0}, {1, 0}, Sign::Plus);
        CHECK(axis.analytic == 0.0);
        CHECK(std::abs(axis.numeric) <= 1e-8);

        const GradientFlowResult g = gradient_flow_identity({0.2, 0.3}, {1, 0}, Sign::Plus);
        CHECK(g.rel_err <= kGradientFlowRelTol);
        CHECK(g.analytic == doctest::Approx(2 * g.stated_form));

        // Ellipse case, half-plane |xi| < |xi0 - xi|: positive off the axis.
        for (double y : {0.05, 0.4, 1.5})
        {
            CHECK(gradient_flow_identity({0.1, y}, {1, 0}, Sign::Plus).analytic > 0);
            CHECK(gradient_flow_identity({0.1, -y}, {1, 0}, Sign::Plus).analytic > 0);
        }
        const GradientFlowResult h = gradient_flow_identity({-0.7, 0.9}, {3, 0}, Sign::Minus);
        CHECK(h.rel_err <= kGradientFlowRelTol);
        CHECK_THROWS_AS(gradient_flow_identity({1, 0}, {1, 0}, Sign::Plus), DomainError);
        CHECK_THROWS_AS(gradient_flow_identity({0.2, 0.3}, {1, 1}, Sign::Plus), DomainError);
    }

    TEST_CASE("sweep expansion")
    {
        SweepSpec s;
        s.base = params({1, 1, 1}, {kInf, 0.25, 0.25});
        s.axes = {{"L1", {0.125, 0.25}}, {"r", {0.5, 1.0, 2.0}}};
        s.sign_patterns = {{Sign::Plus, Sign::Plus, Sign::Plus}, {Sign::Minus, Sign::Plus, Sign::Minus}};
        const auto cfg = expand_sweep(s);
        REQUIRE(cfg.size() == 12);
        CHECK(cfg[0].first.L[1] == 0.125);
        CHECK(cfg[1].second.at("r") == 1.0);
        CHECK(cfg[3].first.L[1] == 0.25);
        CHECK(cfg[6].first.signs[0] == Sign::Minus);

        SweepSpec bad = s;
        bad.axes = {{"L1", {0.3}}};
        CHECK_THROWS_AS(expand_sweep(bad), DomainError);
        bad.axes = {{"L1", {}}};
        CHECK_THROWS_AS(expand_sweep(bad), DomainError);
        SweepSpec big = s;
        std::vector<double> many;
        for (int k = 0; k < 200; ++k)
        {
            many.push_back(std::ldexp(1.0, k - 100));
        }
        big.axes = {{"L1", many}, {"L2", many}};
        CHECK_THROWS_AS(expand_sweep(big), BudgetError);

        SweepSpec alias;
        alias.axes = {{"N", {2.0}}, {"L12", {0.5}}};
        const auto one = expand_sweep(alias);
        REQUIRE(one.size() == 1);
        CHECK(one[0].first.N == std::array<double, 3>{2, 2, 2});
        CHECK(one[0].first.L[2] == 0.5);
    }

    TEST_CASE("slope fits recover known exponents")
    {
        SweepSpec s;
        s.axes = {{"L1", {0.125, 0.25, 0.5, 1.0}}, {"L2", {0.25, 0.5}}};
        std::vector<RatioReport> reps;
        for (const auto& [p, e] : expand_sweep(s))
        {
            RatioReport r;
            r.params = p;
            r.empirical = 3.0 * std::pow(p.L[1], 0.5) * std::pow(p.L[2], 0.25);
            reps.push_back(r);
        }
        const auto fits = fit_slopes(s, reps);
        REQUIRE(fits.size() == 2);
        CHECK(fits[0].parameter == "L1");
        CHECK(fits[0].slope == doctest::Approx(0.5));
        CHECK(fits[0].groups == 2);
        CHECK(fits[1].slope_min == doctest::Approx(0.25));
        CHECK(fits[1].slope_max == doctest::Approx(0.25));
    }

    TEST_CASE("single point sweep")
    {
        SweepSpec s;
        s.base = params({1, 1, 1}, {kInf, 0.01, 0.04});
        s.strategy = Strategy::VolumeRoute;
        const SweepResult r = sweep(s);
        CHECK(r.reports.size() == 1);
        CHECK(r.fits.empty());
        CHECK(r.complete);
        CHECK(r.max_ratio == doctest::Approx(r.reports[0].ratio));
        std::ostringstream csv;
        write_reports_csv(csv, r.reports);
        const std::string text = csv.str();
        CHECK(text.rfind("id,N0,N1,N2,L0,L1,L2,sign0,sign1,sign2,predicted,empirical,ratio,strategy,dims,seed,runtime_ms\n", 0)
              == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
        CHECK(text.find(",inf,") != std::string::npos);
    }

    TEST_CASE("sweep specs round trip through json")
    {
        SweepSpec s;
        s.id = EstimateId::NULL_N2;
        s.base = params({1, 1, 1}, {kInf, 0.25, 0.25});
        s.extras = {{"r", 0.25}};
        s.axes = {{"L12", {0.125, 0.25}}};
        s.strategy = Strategy::Knapp;
        s.dims = {32, 16, 16};
        const SweepSpec t = sweep_spec_from_json(to_json(s));
        CHECK(t.id == s.id);
        CHECK(t.extras == s.extras);
        CHECK(t.axes.size() == 1);
        CHECK(t.dims == s.dims);
        CHECK(std::isinf(t.base.L[0]));
        CHECK_THROWS_AS(sweep_spec_from_json(nlohmann::json::parse(R"({"id":"NOPE"})")), ParseError);
    }

    TEST_CASE("real formatting round trips")
    {
        for (double v : {0.1, 1.0 / 3, 1e-300, 12345.678, -2.5})
        {
            CHECK(std::stod(format_real(v)) == v);
        }
        CHECK(format_real(kInf) == "inf");
    }
}
