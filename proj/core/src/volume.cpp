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

#include "conelab/volume.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "conelab/error.hpp"
#include "conelab/parallel.hpp"
#include "conelab/rng.hpp"

namespace conelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMcChunk = 1 << 14;

double sq(double x) { return x * x; }

} // namespace

std::string to_string(VolumeMethod m)
{
    switch (m)
    {
    case VolumeMethod::MonteCarlo: return "monte_carlo";
    case VolumeMethod::SliceExact: return "slice_exact";
    case VolumeMethod::SliceMc: return "slice_mc";
    }
    return "unknown";
}

std::string to_string(PairSelector s)
{
    switch (s)
    {
    case PairSelector::Output: return "output";
    case PairSelector::Second: return "second";
    case PairSelector::First: return "first";
    }
    return "unknown";
}

nlohmann::json to_json(const VolumeEstimate& v)
{
    return {{"value", v.value},
            {"stderr", v.std_error},
            {"n_samples", v.n_samples},
            {"seed", v.seed},
            {"method", to_string(v.method)}};
}

// -- Monte Carlo -------------------------------------------------------------

VolumeEstimate mc_volume(const Region& R, const Box& box, std::int64_t n, std::uint64_t seed)
{
    if (n < kMinMcSamples)
    {
        throw DomainError("mc_volume: need at least " + std::to_string(kMinMcSamples) + " samples");
    }
    if (box.empty() || !box.bounded() || !(box.volume() > 0.0))
    {
        throw DomainError("mc_volume: degenerate sampling box");
    }
    const CounterRng rng(seed);
    const auto count = static_cast<std::size_t>(n);
    std::vector<std::int64_t> hits(chunk_count(count, kMcChunk), 0);
    parallel_chunks(count, kMcChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
        std::int64_t h = 0;
        for (std::size_t i = begin; i < end; ++i)
        {
            const FreqPoint X{rng.uniform(i, 0, box.tau.lo, box.tau.hi),
                              {rng.uniform(i, 1, box.xi1.lo, box.xi1.hi),
                               rng.uniform(i, 2, box.xi2.lo, box.xi2.hi)}};
            h += contains(R, X) ? 1 : 0;
        }
        hits[c] = h;
    });
    std::int64_t total = 0;
    for (auto h : hits)
    {
        total += h;
    }
    const double p = static_cast<double>(total) / static_cast<double>(n);
    const double V = box.volume();
    return {V * p, V * std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, seed,
            VolumeMethod::MonteCarlo};
}

// -- planar areas ------------------------------------------------------------

double disk_lens_area(double r1, double r2, double d) noexcept
{
    if (!(r1 > 0.0) || !(r2 > 0.0))
    {
        return 0.0;
    }
    d = std::abs(d);
    if (d >= r1 + r2)
    {
        return 0.0;
    }
    if (d <= std::abs(r1 - r2))
    {
        return kPi * sq(std::min(r1, r2));
    }
    const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
    const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
    const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(0.0, k));
}

double band_pair_area(RadialBand a, RadialBand b, double dist) noexcept
{
    if (a.empty() || b.empty())
    {
        return 0.0;
    }
    a.lo = std::max(a.lo, 0.0);
    b.lo = std::max(b.lo, 0.0);
    const double v = disk_lens_area(a.hi, b.hi, dist) - disk_lens_area(a.lo, b.hi, dist)
                     - disk_lens_area(a.hi, b.lo, dist) + disk_lens_area(a.lo, b.lo, dist);
    return std::max(0.0, v);
}

void CircleConfig::validate_lemma() const
{
    if (!(r > 0.0) || !(Rr > 0.0) || !(delta > 0.0) || !(Delta > 0.0))
    {
        throw DomainError("circle config: radii and thicknesses must be positive");
    }
    if (delta > r / 10.0 || Delta > Rr / 10.0)
    {
        throw DomainError("circle config: requires delta <= r/10 and Delta <= R/10");
    }
    if (!(dist > 0.0))
    {
        throw DomainError("circle config: dist must be positive");
    }
}

double annuli_intersection_area(const CircleConfig& c)
{
    if (!(c.dist > 0.0))
    {
        throw DomainError("annuli_intersection_area: dist must be positive");
    }
    return band_pair_area({c.r - c.delta, c.r + c.delta}, {c.Rr - c.Delta, c.Rr + c.Delta}, c.dist);
}

VolumeEstimate mc_annuli_area(const CircleConfig& c, std::int64_t n, std::uint64_t seed)
{
    if (n < kMinMcSamples)
    {
        throw DomainError("mc_annuli_area: need at least " + std::to_string(kMinMcSamples) + " samples");
    }
    const double o1 = c.r + c.delta;
    const double o2 = c.Rr + c.Delta;
    const Interval x = intersect(Interval{-o1, o1}, Interval{c.dist - o2, c.dist + o2});
    const Interval y = intersect(Interval{-o1, o1}, Interval{-o2, o2});
    if (x.empty() || y.empty())
    {
        return {0.0, 0.0, n, seed, VolumeMethod::MonteCarlo};
    }
    const CounterRng rng(seed);
    const auto count = static_cast<std::size_t>(n);
    std::vector<std::int64_t> hits(chunk_count(count, kMcChunk), 0);
    parallel_chunks(count, kMcChunk, [&](std::size_t ci, std::size_t begin, std::size_t end) {
        std::int64_t h = 0;
        for (std::size_t i = begin; i < end; ++i)
        {
            const Vec2 p{rng.uniform(i, 0, x.lo, x.hi), rng.uniform(i, 1, y.lo, y.hi)};
            const double a = norm(p);
            const double b = norm(p - Vec2{c.dist, 0.0});
            h += (std::abs(a - c.r) <= c.delta && std::abs(b - c.Rr) <= c.Delta) ? 1 : 0;
        }
        hits[ci] = h;
    });
    std::int64_t total = 0;
    for (auto h : hits)
    {
        total += h;
    }
    const double p = static_cast<double>(total) / static_cast<double>(n);
    const double A = x.length() * y.length();
    return {A * p, A * std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, seed, VolumeMethod::MonteCarlo};
}

double circle_lemma_bound(const CircleConfig& c)
{
    c.validate_lemma();
    return std::sqrt(c.r * c.Rr * c.delta * c.Delta * std::min(c.delta, c.Delta) / c.dist);
}

namespace {

// |{|xi| <= R, xi1 <= x}|.
double disk_left_of(double R, double x)
{
    if (!(R > 0.0) || x <= -R)
    {
        return 0.0;
    }
    if (x >= R)
    {
        return kPi * R * R;
    }
    return R * R * std::acos(-x / R) + x * std::sqrt(R * R - x * x);
}

} // namespace

StripCircleArea strip_circle_area(double r, double delta, double a, double b)
{
    if (!(delta > 0.0) || delta > r / 10.0)
    {
        throw DomainError("strip_circle_area: requires 0 < delta <= r/10");
    }
    if (!(a < b))
    {
        throw DomainError("strip_circle_area: requires a < b");
    }
    const double outer = disk_left_of(r + delta, b) - disk_left_of(r + delta, a);
    const double inner = disk_left_of(r - delta, b) - disk_left_of(r - delta, a);
    return {std::max(0.0, outer - inner), delta * std::sqrt(r * (b - a)), (b - a) * std::sqrt(r * delta)};
}

// -- cone shells -------------------------------------------------------------

ConeShell ConeShell::from_region(const Region& R)
{
    if (const auto* c = std::get_if<shape::ConeBall>(&R.shape()))
    {
        return ball(c->sign, c->N, c->L);
    }
    if (const auto* c = std::get_if<shape::ConeAnnulus>(&R.shape()))
    {
        return annulus(c->sign, c->N, c->L);
    }
    throw DomainError("slice integration needs cone_ball or cone_annulus regions, got " + R.type_name());
}

RadialBand ConeShell::band_at(double tau) const noexcept
{
    double lo = r_lo;
    double hi = r_hi;
    if (std::isfinite(L))
    {
        const double c = value(sign) * tau;
        lo = std::max(lo, c - L);
        hi = std::min(hi, c + L);
    }
    return {std::max(lo, 0.0), hi};
}

Interval ConeShell::tau_range() const noexcept
{
    if (sign == Sign::Plus)
    {
        return {r_lo - L, r_hi + L};
    }
    return {-r_hi - L, -r_lo + L};
}

namespace {

// Largest violation of the conditions under which the two slice bands can
// meet; convex in tau, so {violation <= 0} is an interval.
double slice_violation(const ConeShell& A, const ConeShell& B, const FreqPoint& X0, int sigma, double d,
                       double tau)
{
    const RadialBand a = A.band_at(tau);
    const RadialBand b = B.band_at(sigma * (tau - X0.tau));
    return std::max({a.lo - a.hi, b.lo - b.hi, a.lo - b.hi - d, b.lo - a.hi - d, d - a.hi - b.hi});
}

// Tight tau-interval where slices are nonempty; empty interval if none.
Interval slice_support(const ConeShell& A, const ConeShell& B, const FreqPoint& X0, int sigma)
{
    Interval rb = B.tau_range();
    rb = sigma > 0 ? Interval{X0.tau + rb.lo, X0.tau + rb.hi} : Interval{X0.tau - rb.hi, X0.tau - rb.lo};
    const Interval range = intersect(A.tau_range(), rb);
    if (range.empty() || !std::isfinite(range.lo) || !std::isfinite(range.hi))
    {
        if (!range.empty())
        {
            throw DomainError("slice integration over an unbounded tau-range");
        }
        return {1.0, 0.0};
    }
    const double d = norm(X0.xi);
    auto g = [&](double t) { return slice_violation(A, B, X0, sigma, d, t); };
    constexpr int probes = 1024;
    const double step = range.length() / probes;
    int best = 0;
    double gbest = kInf;
    for (int k = 0; k <= probes; ++k)
    {
        const double v = g(range.lo + k * step);
        if (v < gbest)
        {
            gbest = v;
            best = k;
        }
    }
    const double tmin = range.lo + best * step;
    if (gbest > 0.0)
    {
        // The convex minimum may fall between probes; polish by ternary search.
        double lo = std::max(range.lo, tmin - step), hi = std::min(range.hi, tmin + step);
        for (int it = 0; it < 100; ++it)
        {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (g(m1) < g(m2))
            {
                hi = m2;
            }
            else
            {
                lo = m1;
            }
        }
        if (g(0.5 * (lo + hi)) > 0.0)
        {
            return {1.0, 0.0};
        }
        const double t = 0.5 * (lo + hi);
        return {t, t};
    }
    auto edge = [&](double inside, double outside) {
        if (g(outside) <= 0.0)
        {
            return outside;
        }
        for (int it = 0; it < 80; ++it)
        {
            const double m = 0.5 * (inside + outside);
            (g(m) <= 0.0 ? inside : outside) = m;
        }
        return outside;
    };
    return {edge(tmin, range.lo), edge(tmin, range.hi)};
}

double midpoint_slices(const ConeShell& A, const ConeShell& B, const FreqPoint& X0, int sigma, Interval I,
                       int n)
{
    const double d = norm(X0.xi);
    const double h = I.length() / n;
    double sum = 0.0;
    for (int k = 0; k < n; ++k)
    {
        const double tau = I.lo + (k + 0.5) * h;
        sum += band_pair_area(A.band_at(tau), B.band_at(sigma * (tau - X0.tau)), d);
    }
    return sum * h;
}

} // namespace

double shell_pair_volume(const ConeShell& A, const ConeShell& B, const FreqPoint& X0, int sigma,
                         const SliceOptions& opt)
{
    if (sigma != 1 && sigma != -1)
    {
        throw DomainError("shell_pair_volume: sigma must be +1 or -1");
    }
    const Interval I = slice_support(A, B, X0, sigma);
    if (I.empty() || !(I.length() > 0.0))
    {
        return 0.0;
    }
    int n = std::max(1, opt.slices);
    double v = midpoint_slices(A, B, X0, sigma, I, n);
    if (!opt.converge)
    {
        return v;
    }
    while (2 * n <= opt.max_slices)
    {
        const double w = midpoint_slices(A, B, X0, sigma, I, 2 * n);
        n *= 2;
        const bool done = std::abs(w - v) <= opt.rel_change * std::abs(w);
        v = w;
        if (done)
        {
            break;
        }
    }
    return v;
}

VolumeEstimate e_set_volume(const DyadicParams& p, const FreqPoint& X0, VolumeMethod method,
                            std::int64_t n_mc, std::uint64_t seed)
{
    p.validate();
    if (method == VolumeMethod::SliceExact)
    {
        const ConeShell A1 = ConeShell::annulus(p.signs[1], p.N[1], p.L[1]);
        const ConeShell A2 = ConeShell::annulus(p.signs[2], p.N[2], p.L[2]);
        return {shell_pair_volume(A1, A2, X0, -1), 0.0, 0, 0, VolumeMethod::SliceExact};
    }
    if (method != VolumeMethod::MonteCarlo)
    {
        throw DomainError("e_set_volume: method must be slice_exact or monte_carlo");
    }
    const Region E = Region::intersect(
        {Region::cone_annulus(p.signs[1], p.N[1], p.L[1]),
         Region::translate(X0, Region::reflect(Region::cone_annulus(p.signs[2], p.N[2], p.L[2])))});
    const Box box = bounding_box(E);
    if (box.empty() || !(box.volume() > 0.0))
    {
        return {0.0, 0.0, n_mc, seed, VolumeMethod::MonteCarlo};
    }
    return mc_volume(E, box, n_mc, seed);
}

// -- sup search --------------------------------------------------------------

namespace {

struct PairRoles
{
    ConeShell A;
    ConeShell B;
    int sigma;
    ConeShell X; ///< set the translate ranges over
};

PairRoles roles(const DyadicParams& p, PairSelector which)
{
    const ConeShell K0 = ConeShell::annulus(p.signs[0], p.N[0], p.L[0]);
    const ConeShell K1 = ConeShell::annulus(p.signs[1], p.N[1], p.L[1]);
    const ConeShell K2 = ConeShell::annulus(p.signs[2], p.N[2], p.L[2]);
    switch (which)
    {
    case PairSelector::Output: return {K1, K2, -1, K0};
    case PairSelector::Second: return {K0, K1, +1, K2};
    case PairSelector::First: return {K0, K2, +1, K1};
    }
    throw DomainError("unknown pair selector");
}

// A search point: tau = anchor * rho + offset.
struct Candidate
{
    double rho;
    int anchor;
    double offset;
    double value;
};

double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters, double& best_x)
{
    constexpr double g = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i)
    {
        if (fc >= fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if (fc >= fd)
    {
        best_x = c;
        return fc;
    }
    best_x = d;
    return fd;
}

} // namespace

SupResult sup_pair_volume(const DyadicParams& p, PairSelector which, const SupSearchOptions& opt)
{
    p.validate();
    const PairRoles R = roles(p, which);
    const double sX = value(R.X.sign);

    // tau0 values for which A ∩ (X0 + sigma B) can be nonempty.
    const Interval ra = R.A.tau_range();
    const Interval rb = R.B.tau_range();
    const Interval reach = R.sigma < 0 ? Interval{ra.lo + rb.lo, ra.hi + rb.hi}
                                       : Interval{ra.lo - rb.hi, ra.hi - rb.lo};
    const double lmin = std::min({R.A.L, R.B.L, R.X.L});
    const bool x_thin = std::isfinite(R.X.L);

    auto eval = [&](double rho, int anchor, double offset, const SliceOptions& so) {
        const FreqPoint X0{anchor * rho + offset, {rho, 0.0}};
        return shell_pair_volume(R.A, R.B, X0, R.sigma, so);
    };
    const SliceOptions coarse{opt.coarse_slices, 0.0, opt.coarse_slices, false};
    const SliceOptions medium{opt.refine_slices, 0.0, opt.refine_slices, false};

    // Admissible offset window for a given anchor.
    auto window = [&](int anchor, double rho) -> Interval {
        if (x_thin)
        {
            return {-R.X.L, R.X.L};
        }
        const Interval w{reach.lo - anchor * rho, reach.hi - anchor * rho};
        return w;
    };

    std::vector<Candidate> grid;
    const double rstep = (R.X.r_hi - R.X.r_lo) / opt.grid_rho;
    static constexpr double kCluster[] = {-16, -8, -4, -2, -1, -0.5, -0.25, 0, 0.25, 0.5, 1, 2, 4, 8, 16};
    for (int i = 0; i < opt.grid_rho; ++i)
    {
        const double rho = R.X.r_lo + (i + 0.5) * rstep;
        std::vector<std::pair<int, double>> taus;
        const int uniform = opt.grid_tau - 2 * static_cast<int>(std::size(kCluster));
        if (x_thin)
        {
            const int anchor = static_cast<int>(sX);
            for (int k = 0; k < std::max(2, uniform); ++k)
            {
                taus.emplace_back(anchor, -R.X.L + 2.0 * R.X.L * k / (std::max(2, uniform) - 1));
            }
            for (int a : {-1, 1})
            {
                for (double t : kCluster)
                {
                    // Cluster offsets expressed relative to the X-set anchor.
                    const double tau = a * rho + t * lmin;
                    const double off = tau - anchor * rho;
                    if (std::abs(off) <= R.X.L)
                    {
                        taus.emplace_back(anchor, off);
                    }
                }
            }
        }
        else
        {
            for (int k = 0; k < std::max(2, uniform); ++k)
            {
                taus.emplace_back(0, reach.lo + reach.length() * (k + 0.5) / std::max(2, uniform));
            }
            for (int a : {-1, 1})
            {
                for (double t : kCluster)
                {
                    taus.emplace_back(a, t * lmin);
                }
            }
        }
        for (auto [anchor, off] : taus)
        {
            grid.push_back({rho, anchor, off, 0.0});
        }
    }
    parallel_for(grid.size(), [&](std::size_t k) {
        grid[k].value = eval(grid[k].rho, grid[k].anchor, grid[k].offset, coarse);
    });

    std::vector<std::size_t> order(grid.size());
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        order[k] = k;
    }
    // Stable ordering keeps ties deterministic.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid[a].value > grid[b].value; });
    if (grid.empty() || !(grid[order[0]].value > 0.0))
    {
        return {0.0, {}};
    }

    const int ncand = std::min<int>(opt.refine_candidates, static_cast<int>(order.size()));
    std::vector<Candidate> refined(ncand);
    parallel_for(static_cast<std::size_t>(ncand), [&](std::size_t c) {
        Candidate best = grid[order[c]];
        best.value = eval(best.rho, best.anchor, best.offset, medium);
        // Offset scale: distance to the nearest other grid offset at this rho.
        double ostep = kInf;
        for (const auto& g : grid)
        {
            if (g.rho == best.rho && g.anchor == best.anchor && g.offset != best.offset)
            {
                ostep = std::min(ostep, std::abs(g.offset - best.offset));
            }
        }
        if (!std::isfinite(ostep))
        {
            ostep = std::max(lmin, 1e-9);
        }
        for (int round = 0; round < 2; ++round)
        {
            const Interval w = window(best.anchor, best.rho);
            const Interval oI = intersect(w, Interval{best.offset - ostep, best.offset + ostep});
            if (oI.length() > 0.0)
            {
                double x = best.offset;
                const double v = golden_max(
                    [&](double o) { return eval(best.rho, best.anchor, o, medium); }, oI.lo, oI.hi,
                    opt.golden_iterations, x);
                if (v > best.value)
                {
                    best.value = v;
                    best.offset = x;
                }
            }
            const Interval rI = intersect(Interval{R.X.r_lo, R.X.r_hi},
                                          Interval{best.rho - rstep, best.rho + rstep});
            if (rI.length() > 0.0)
            {
                double x = best.rho;
                const double v = golden_max(
                    [&](double r) {
                        const Interval wr = window(best.anchor, r);
                        if (!wr.contains(best.offset))
                        {
                            return 0.0;
                        }
                        return eval(r, best.anchor, best.offset, medium);
                    },
                    rI.lo, rI.hi, opt.golden_iterations, x);
                if (v > best.value)
                {
                    best.value = v;
                    best.rho = x;
                }
            }
            ostep *= 0.5;
        }
        best.value = eval(best.rho, best.anchor, best.offset, opt.final_slices);
        refined[c] = best;
    });

    const Candidate* top = &refined[0];
    for (const auto& c : refined)
    {
        if (c.value > top->value)
        {
            top = &c;
        }
    }
    return {top->value, {top->anchor * top->rho + top->offset, {top->rho, 0.0}}};
}

BilinearVolumeConstant bilinear_constant_volume(const DyadicParams& p, const SupSearchOptions& opt)
{
    BilinearVolumeConstant out;
    double best = kInf;
    for (PairSelector s : {PairSelector::Output, PairSelector::Second, PairSelector::First})
    {
        const auto k = static_cast<std::size_t>(s);
        out.sups[k] = sup_pair_volume(p, s, opt);
        if (out.sups[k].value < best)
        {
            best = out.sups[k].value;
            out.attained = s;
        }
    }
    out.constant = std::sqrt(best);
    return out;
}

// -- tiling sets -------------------------------------------------------------

namespace {

bool is_tiling_set(const Region& A0)
{
    const auto& v = A0.shape();
    if (std::holds_alternative<Box>(v))
    {
        return true;
    }
    if (const auto* c = std::get_if<shape::ConeBall>(&v))
    {
        return std::isfinite(c->L);
    }
    if (const auto* c = std::get_if<shape::ConeAnnulus>(&v))
    {
        return std::isfinite(c->L);
    }
    if (const auto* in = std::get_if<shape::Intersect>(&v))
    {
        const bool has_null_slab = std::any_of(in->items.begin(), in->items.end(), [](const Region& r) {
            return std::holds_alternative<shape::NullSlab>(r.shape());
        });
        if (!has_null_slab)
        {
            return false;
        }
        try
        {
            return bounding_box(A0).bounded();
        }
        catch (const DomainError&)
        {
            return false;
        }
    }
    return false;
}

} // namespace

Box tiling_cell(const Region& A0)
{
    if (!is_tiling_set(A0))
    {
        throw DomainError("not an approximate tiling set: " + A0.type_name());
    }
    return bounding_box(A0);
}

VolumeEstimate triple_intersection_volume(const DyadicParams& p, const FreqPoint& X, const FreqPoint& Xlat,
                                          const Region* A0, std::int64_t n, std::uint64_t seed)
{
    p.validate();
    std::vector<Region> items{
        Region::cone_annulus(p.signs[1], p.N[1], p.L[1]),
        Region::translate(X, Region::reflect(Region::cone_annulus(p.signs[2], p.N[2], p.L[2])))};
    if (A0 != nullptr)
    {
        (void)tiling_cell(*A0);
        items.push_back(Region::translate(Xlat, *A0));
    }
    const Region E = Region::intersect(std::move(items));
    const Box box = bounding_box(E);
    if (box.empty() || !(box.volume() > 0.0))
    {
        return {0.0, 0.0, n, seed, VolumeMethod::MonteCarlo};
    }
    return mc_volume(E, box, n, seed);
}

} // namespace conelab
