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

#include "conelab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "conelab/decomposition.hpp"
#include "conelab/error.hpp"
#include "conelab/estimates.hpp"
#include "conelab/parallel.hpp"
#include "conelab/rng.hpp"
#include "conelab/volume.hpp"

namespace conelab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform draws for one trial: lane j of counter `trial`.
class Draw
{
public:
    Draw(const CounterRng& rng, std::uint64_t trial) : rng_(rng), trial_(trial) {}

    double u(double lo, double hi) { return rng_.uniform(trial_, lane_++, lo, hi); }
    double log2u(double lo, double hi) { return std::exp2(u(lo, hi)); }
    int integer(int lo, int hi) // inclusive
    {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(rng_.bits(trial_, lane_++) % span);
    }
    Sign sign() { return integer(0, 1) == 0 ? Sign::Plus : Sign::Minus; }

private:
    const CounterRng& rng_;
    std::uint64_t trial_;
    std::uint32_t lane_ = 0;
};

std::int64_t trials_or(const VerifyOptions& opt, std::int64_t fallback)
{
    if (opt.trials < 0)
    {
        throw DomainError("verify: trials must be non-negative");
    }
    return opt.trials > 0 ? opt.trials : fallback;
}

// Evaluates f on every trial in parallel; the result vector is indexed by
// trial so reductions never depend on scheduling.
template <class T>
std::vector<T> per_trial(std::int64_t n, const std::function<T(std::uint64_t)>& f)
{
    std::vector<T> out(static_cast<std::size_t>(n));
    parallel_for(out.size(), [&](std::size_t i) { out[i] = f(i); });
    return out;
}

CounterRng suite_rng(const VerifyOptions& opt, const char* name)
{
    return CounterRng(derive_seed(opt.seed, name));
}

VerifySummary circle_intersection(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 200);
    const CounterRng rng = suite_rng(opt, "circle-intersection");
    struct Row
    {
        CircleConfig c;
        double exact, bound;
    };
    const auto rows = per_trial<Row>(n, [&](std::uint64_t i) {
        Draw d(rng, i);
        CircleConfig c;
        c.r = d.log2u(-3, 3);
        c.Rr = d.log2u(-3, 3);
        c.delta = c.r / 10.0 * d.log2u(-6, 0);
        c.Delta = c.Rr / 10.0 * d.log2u(-6, 0);
        const double hi = c.r + c.Rr + c.delta + c.Delta;
        const double lo = std::max(std::abs(c.r - c.Rr) - c.delta - c.Delta, 1e-9 * hi);
        c.dist = d.u(lo, hi);
        return Row{c, annuli_intersection_area(c), circle_lemma_bound(c)};
    });
    VerifySummary s;
    s.lemma = "circle-intersection";
    s.trials = n;
    s.metric = "max_ratio";
    std::size_t worst = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const double ratio = rows[i].exact / rows[i].bound;
        if (ratio > s.value)
        {
            s.value = ratio;
            worst = i;
        }
    }
    s.pass = s.value <= opt.tol;
    if (!rows.empty())
    {
        const auto& c = rows[worst].c;
        s.details["worst"] = {{"r", c.r}, {"R", c.Rr}, {"delta", c.delta}, {"Delta", c.Delta},
                              {"dist", c.dist}, {"exact", rows[worst].exact}, {"bound", rows[worst].bound}};
    }
    s.details["tol"] = opt.tol;
    return s;
}

VerifySummary strip_circle(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 200);
    const CounterRng rng = suite_rng(opt, "strip-circle");
    struct Row
    {
        double r2 = 0.0, r22 = 0.0;
    };
    const auto rows = per_trial<Row>(n, [&](std::uint64_t i) {
        Draw d(rng, i);
        const double r = d.log2u(-3, 3);
        const double delta = r / 10.0 * d.log2u(-6, 0);
        double a = d.u(0.0, r + delta), b = d.u(0.0, r + delta);
        if (a > b)
        {
            std::swap(a, b);
        }
        if (!(a < b))
        {
            b = std::nextafter(a, kInf);
        }
        const auto area = strip_circle_area(r, delta, a, b);
        return Row{area.exact / area.bound20, area.exact / area.bound22};
    });
    double m20 = 0.0, m22 = 0.0;
    for (const auto& r : rows)
    {
        m20 = std::max(m20, r.r2);
        m22 = std::max(m22, r.r22);
    }
    VerifySummary s;
    s.lemma = "strip-circle";
    s.trials = n;
    s.metric = "max_ratio";
    s.value = std::max(m20, m22);
    s.pass = s.value <= opt.tol;
    s.details = {{"max_ratio_bound20", m20}, {"max_ratio_bound22", m22}, {"tol", opt.tol}};
    return s;
}

VerifySummary overlap(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 100000);
    const CounterRng rng = suite_rng(opt, "overlap");
    struct Row
    {
        int cover = 0, neighbors = 0, k = 0;
    };
    const auto rows = per_trial<Row>(n, [&](std::uint64_t i) {
        Draw d(rng, i);
        const Vec2 xi = d.log2u(-3, 3) * unit_at(d.u(0.0, 2.0 * kPi));
        const double gamma = std::exp2(-d.integer(1, 12));
        const int k = d.integer(1, 16);
        const DirectionSet set = omega_set(gamma);
        const auto pick = static_cast<std::size_t>(d.integer(0, static_cast<int>(set.size()) - 1));
        return Row{sector_cover_count(xi, gamma), neighbor_count(set.directions[pick], k, gamma), k};
    });
    std::int64_t cover_bad = 0, neighbor_bad = 0;
    int cmin = std::numeric_limits<int>::max(), cmax = 0;
    for (const auto& r : rows)
    {
        cover_bad += (r.cover < 1 || r.cover > 5) ? 1 : 0;
        neighbor_bad += r.neighbors > 2 * r.k + 1 ? 1 : 0;
        cmin = std::min(cmin, r.cover);
        cmax = std::max(cmax, r.cover);
    }
    VerifySummary s;
    s.lemma = "overlap";
    s.trials = n;
    s.metric = "violations";
    s.value = static_cast<double>(cover_bad + neighbor_bad);
    s.pass = s.value == 0.0;
    s.details = {{"cover_violations", cover_bad}, {"neighbor_violations", neighbor_bad},
                 {"cover_min", rows.empty() ? 0 : cmin}, {"cover_max", cmax}};
    return s;
}

VerifySummary whitney(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 100000);
    const CounterRng rng = suite_rng(opt, "whitney");
    const auto values = per_trial<double>(n, [&](std::uint64_t i) {
        Draw d(rng, i);
        const double gmin = std::exp2(-d.integer(4, 12));
        const double phi = d.u(0.0, 2.0 * kPi);
        const double sep = d.u(24.0 * gmin, kPi);
        const Vec2 xi1 = d.log2u(-3, 3) * unit_at(phi);
        const Vec2 xi2 = d.log2u(-3, 3) * unit_at(phi + (d.integer(0, 1) == 0 ? sep : -sep));
        return whitney_sum(xi1, xi2, gmin);
    });
    double lo = kInf, hi = 0.0;
    std::int64_t bad = 0;
    for (double v : values)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        bad += (v < 1.0 || v > kWhitneyBound) ? 1 : 0;
    }
    VerifySummary s;
    s.lemma = "whitney";
    s.trials = n;
    s.metric = "violations";
    s.value = static_cast<double>(bad);
    s.pass = bad == 0;
    s.details = {{"min_sum", values.empty() ? 0.0 : lo}, {"max_sum", hi}, {"bound", kWhitneyBound}};
    return s;
}

VerifySummary nullplane(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 10000);
    const CounterRng rng = suite_rng(opt, "nullplane-count");
    const auto ratios = per_trial<double>(n, [&](std::uint64_t i) {
        Draw d(rng, i);
        const double N = d.log2u(-3, 3);
        const Vec2 xi = d.u(N, 2.0 * N) * unit_at(d.u(0.0, 2.0 * kPi));
        const double gamma = std::exp2(-d.integer(1, 12));
        const double dd = N * d.log2u(-12, 2);
        const Vec2 omega = unit_at(d.u(0.0, 2.0 * kPi));
        const FreqPoint X{dot(xi, omega) + d.u(-2.0 * dd, 2.0 * dd), xi};
        return nullplane_count(X, dd, gamma, N) / nullplane_bound(dd, gamma, N, 1.0);
    });
    double worst = 0.0;
    for (double r : ratios)
    {
        worst = std::max(worst, r);
    }
    VerifySummary s;
    s.lemma = "nullplane-count";
    s.trials = n;
    s.metric = "max_ratio";
    s.value = worst;
    s.pass = worst <= opt.tol;
    s.details = {{"tol", opt.tol}};
    return s;
}

VerifySummary cone_nullslab(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 200);
    const CounterRng rng = suite_rng(opt, "cone-nullslab");
    constexpr std::int64_t kPoints = 2000;
    struct Row
    {
        double excess = 0.0, shrunk_excess = 0.0;
    };
    const auto rows = per_trial<Row>(n, [&](std::uint64_t i) {
        Draw d(rng, i);
        const Sign sg = d.sign();
        const double N = d.log2u(-3, 3);
        const double L = N * d.log2u(-10, -2);
        const double gamma = std::exp2(-d.integer(1, 12));
        const Vec2 omega = unit_at(d.u(0.0, 2.0 * kPi));
        const std::uint64_t sub = derive_seed(rng.seed(), i);
        return Row{cone_nullslab_check(sg, N, L, gamma, omega, kPoints, sub).worst_excess,
                   cone_nullslab_check(sg, N, L, gamma, omega, kPoints, sub, 0.5 * kConePlaneConstant)
                       .worst_excess};
    });
    std::int64_t bad = 0, shrunk_fail = 0;
    double worst = -kInf;
    for (const auto& r : rows)
    {
        bad += r.excess > 0.0 ? 1 : 0;
        shrunk_fail += r.shrunk_excess > 0.0 ? 1 : 0;
        worst = std::max(worst, r.excess);
    }
    VerifySummary s;
    s.lemma = "cone-nullslab";
    s.trials = n;
    s.metric = "violations";
    s.value = static_cast<double>(bad);
    // The halved constant must be refuted somewhere, otherwise c is not tight.
    s.pass = bad == 0 && shrunk_fail > 0;
    s.details = {{"c", kConePlaneConstant}, {"points_per_sector", kPoints}, {"worst_excess", worst},
                 {"halved_c_failures", shrunk_fail}};
    return s;
}

VerifySummary angle_lemma(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 1000000);
    const CounterRng rng = suite_rng(opt, "angle-lemma");
    struct Row
    {
        double ratio = kInf;
        double second = 0.0; // 0 when the second part does not apply
    };
    constexpr std::size_t kChunk = 4096;
    std::vector<Row> rows(static_cast<std::size_t>(n));
    parallel_chunks(rows.size(), kChunk, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
        {
            Draw d(rng, i);
            FreqPoint X[2];
            Sign sg[2];
            for (int j = 0; j < 2; ++j)
            {
                const double m = d.log2u(-4, 4);
                sg[j] = d.sign();
                X[j].xi = m * unit_at(d.u(0.0, 2.0 * kPi));
                X[j].tau = value(sg[j]) * m + d.u(-0.5 * m, 0.5 * m);
            }
            if (norm(X[0].xi + X[1].xi) == 0.0)
            {
                continue;
            }
            Row row;
            for (Sign s0 : {Sign::Plus, Sign::Minus})
            {
                const auto res = angle_lemma_check(X[0], X[1], s0, sg[0], sg[1]);
                row.ratio = std::min(row.ratio, res.ratio);
                if (res.second_part_applicable)
                {
                    row.second = res.second_part_ratio;
                }
            }
            rows[i] = row;
        }
    });
    double min_ratio = kInf, smin = kInf, smax = 0.0;
    std::int64_t applicable = 0, second_bad = 0;
    for (const auto& r : rows)
    {
        min_ratio = std::min(min_ratio, r.ratio);
        if (r.second > 0.0)
        {
            ++applicable;
            smin = std::min(smin, r.second);
            smax = std::max(smax, r.second);
            second_bad += (r.second < 0.125 || r.second > 8.0) ? 1 : 0;
        }
    }
    VerifySummary s;
    s.lemma = "angle-lemma";
    s.trials = n;
    s.metric = "min_ratio";
    s.value = min_ratio;
    s.pass = min_ratio >= kAngleLemmaConstant && second_bad == 0;
    s.details = {{"c_I", kAngleLemmaConstant},
                 {"second_part_applicable", applicable},
                 {"second_part_min", applicable ? smin : 0.0},
                 {"second_part_max", smax},
                 {"second_part_violations", second_bad},
                 {"domination_factor", kDominationFactor}};
    return s;
}

VerifySummary curvature(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 50);
    const CounterRng rng = suite_rng(opt, "curvature");
    struct Row
    {
        CurvatureResult res;
        double alpha = 0.0;
        double factor = 0.0; // smallest kappa_tol that would pass this conic
        Conic conic = Conic::Ellipse;
    };
    const auto rows = per_trial<Row>(n, [&](std::uint64_t i) {
        Draw d(rng, i);
        const Conic conic = i % 2 == 0 ? Conic::Ellipse : Conic::Hyperbola;
        // N1 = 1 << N2, with << realized as a factor 8.
        const double N2 = std::exp2(d.integer(3, 5));
        const double m1 = d.u(1.0, 2.0), m2 = d.u(N2, 2.0 * N2);
        const double alpha = d.log2u(-6, -2);
        const double t12 = alpha * d.log2u(0.0, std::log2(kPi / (2.0 * alpha)));
        const double phi = d.u(0.0, 2.0 * kPi);
        const Vec2 xi1 = m1 * unit_at(phi);
        const double turn = d.integer(0, 1) == 0 ? t12 : -t12;
        const double s2 = conic == Conic::Ellipse ? 1.0 : -1.0;
        const Vec2 xi2 = s2 * m2 * unit_at(phi + turn);
        const Vec2 xi0 = xi1 + xi2;
        const double c = 0.5 * norm(xi0);
        const double a = conic == Conic::Ellipse ? 0.5 * (m1 + m2) : 0.5 * (m2 - m1);
        const Vec2 e0 = xi0 * (1.0 / norm(xi0));
        const double th1 = std::atan2(cross(e0, xi1), dot(e0, xi1));
        // r(θ) changes on the angular scale D/c; a window of 0.1 in that
        // unit keeps |ξ| comparable to |ξ1|.
        const double D = a + (conic == Conic::Ellipse ? -c : c) * std::cos(th1);
        const double half = 0.1 * std::min(1.0, D / c);
        Row row;
        row.conic = conic;
        row.alpha = alpha;
        row.res = curvature_check(a, c, conic, {th1 - half, th1 + half}, alpha, kCurvatureTolerance);
        row.factor = std::max(alpha / (row.res.N1_proxy * row.res.kappa_min), row.res.kappa_max * row.res.N1_proxy);
        return row;
    });
    double worst_factor = 0.0, worst_err = 0.0;
    std::int64_t samples = 0, failed = 0;
    for (const auto& r : rows)
    {
        worst_factor = std::max(worst_factor, r.factor);
        worst_err = std::max(worst_err, r.res.max_rel_err);
        samples += r.res.samples;
        failed += r.res.pass ? 0 : 1;
    }
    VerifySummary s;
    s.lemma = "curvature";
    s.trials = n;
    s.metric = "max_factor";
    s.value = worst_factor;
    s.pass = failed == 0;
    s.details = {{"kappa_tol", kCurvatureTolerance}, {"max_rel_err", worst_err}, {"rel_tol", kCurvatureRelTol},
                 {"angles_checked", samples}, {"failed_conics", failed}};
    return s;
}

VerifySummary gradient_flow(const VerifyOptions& opt)
{
    const auto n = trials_or(opt, 1000);
    const CounterRng rng = suite_rng(opt, "gradient-flow");
    const auto errs = per_trial<double>(n, [&](std::uint64_t i) {
        Draw d(rng, i);
        const double m0 = d.log2u(-3, 3);
        const Sign sg = d.sign();
        const Vec2 xi0{m0, 0.0};
        Vec2 xi;
        do
        {
            xi = Vec2{d.u(-2.0, 2.0), d.u(-2.0, 2.0)} * m0;
        } while (norm(xi) < 1e-3 * m0 || norm(xi0 - xi) < 1e-3 * m0);
        return gradient_flow_identity(xi, xi0, sg).rel_err;
    });
    double worst = 0.0;
    for (double e : errs)
    {
        worst = std::max(worst, e);
    }
    VerifySummary s;
    s.lemma = "gradient-flow";
    s.trials = n;
    s.metric = "max_err";
    s.value = worst;
    s.pass = worst <= kGradientFlowRelTol;
    s.details = {{"rel_tol", kGradientFlowRelTol}};
    return s;
}

using Suite = VerifySummary (*)(const VerifyOptions&);

const std::map<std::string, Suite>& suites()
{
    static const std::map<std::string, Suite> m{
        {"circle-intersection", circle_intersection},
        {"strip-circle", strip_circle},
        {"overlap", overlap},
        {"whitney", whitney},
        {"nullplane-count", nullplane},
        {"cone-nullslab", cone_nullslab},
        {"angle-lemma", angle_lemma},
        {"curvature", curvature},
        {"gradient-flow", gradient_flow},
    };
    return m;
}

} // namespace

const std::vector<std::string>& lemma_names()
{
    static const std::vector<std::string> names{"circle-intersection", "strip-circle", "overlap",
                                                "whitney",             "nullplane-count", "cone-nullslab",
                                                "angle-lemma",         "curvature",       "gradient-flow"};
    return names;
}

VerifySummary run_verify(const std::string& lemma, const VerifyOptions& opt)
{
    const auto it = suites().find(lemma);
    if (it == suites().end())
    {
        std::string known;
        for (const auto& n : lemma_names())
        {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw ParseError("unknown lemma '" + lemma + "' (known: " + known + ")");
    }
    if (!(opt.tol > 0.0))
    {
        throw DomainError("verify: tol must be positive");
    }
    return it->second(opt);
}

nlohmann::json to_json(const VerifySummary& s)
{
    nlohmann::json j;
    j["lemma"] = s.lemma;
    j["trials"] = s.trials;
    j[s.metric] = s.value;
    j["pass"] = s.pass;
    j["details"] = s.details;
    return j;
}

} // namespace conelab
