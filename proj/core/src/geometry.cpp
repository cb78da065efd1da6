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

#include "conelab/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "conelab/error.hpp"

namespace conelab {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit(Vec2 omega, const char* what)
{
    if (!(std::abs(norm(omega) - 1.0) <= kUnitTolerance))
    {
        throw DomainError(std::string(what) + ": omega must have unit norm");
    }
}

void require_positive(double v, const char* what, bool allow_inf = false)
{
    if (!(v > 0.0) || (!allow_inf && !std::isfinite(v)))
    {
        throw DomainError(std::string(what) + " must be positive" + (allow_inf ? "" : " and finite"));
    }
}

void require_interval(Interval I, const char* what)
{
    if (!(I.lo <= I.hi) || !std::isfinite(I.lo) || !std::isfinite(I.hi))
    {
        throw DomainError(std::string(what) + ": interval must be finite and nonempty");
    }
}

// Cone sheet distance |tau - s|xi|| relative to L.
double cone_slack(Sign s, double L, const FreqPoint& X)
{
    if (std::isinf(L))
    {
        return kInf;
    }
    return L - std::abs(X.tau - value(s) * norm(X.xi));
}

template <class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

Sign sign_from_int(int v)
{
    if (v == 1)
    {
        return Sign::Plus;
    }
    if (v == -1)
    {
        return Sign::Minus;
    }
    throw DomainError("sign must be +1 or -1, got " + std::to_string(v));
}

bool Box::bounded() const noexcept
{
    return std::isfinite(tau.lo) && std::isfinite(tau.hi) && std::isfinite(xi1.lo)
           && std::isfinite(xi1.hi) && std::isfinite(xi2.lo) && std::isfinite(xi2.hi);
}

double Box::volume() const noexcept
{
    if (empty())
    {
        return 0.0;
    }
    return tau.length() * xi1.length() * xi2.length();
}

Box intersect(const Box& a, const Box& b) noexcept
{
    return {intersect(a.tau, b.tau), intersect(a.xi1, b.xi1), intersect(a.xi2, b.xi2)};
}

// -- DyadicParams ------------------------------------------------------------

void DyadicParams::validate() const
{
    for (int j = 0; j < 3; ++j)
    {
        require_positive(N[j], ("N" + std::to_string(j)).c_str());
    }
    require_positive(L[0], "L0", true);
    require_positive(L[1], "L1");
    require_positive(L[2], "L2");
}

double DyadicParams::n012_min() const noexcept { return std::min({N[0], N[1], N[2]}); }
double DyadicParams::n12_min() const noexcept { return std::min(N[1], N[2]); }
double DyadicParams::n12_max() const noexcept { return std::max(N[1], N[2]); }
double DyadicParams::n0j_min(int j) const noexcept { return std::min(N[0], N[j]); }
double DyadicParams::l12_min() const noexcept { return std::min(L[1], L[2]); }
double DyadicParams::l12_max() const noexcept { return std::max(L[1], L[2]); }
double DyadicParams::l0j_min(int j) const noexcept { return std::min(L[0], L[j]); }
double DyadicParams::l0j_max(int j) const noexcept { return std::max(L[0], L[j]); }
double DyadicParams::l012_min() const noexcept { return std::min({L[0], L[1], L[2]}); }
double DyadicParams::l012_max() const noexcept { return std::max({L[0], L[1], L[2]}); }
double DyadicParams::l012_med() const noexcept
{
    std::array<double, 3> s = L;
    std::sort(s.begin(), s.end());
    return s[1];
}

// -- angles ------------------------------------------------------------------

double angle(Vec2 a, Vec2 b)
{
    const double na = norm(a);
    const double nb = norm(b);
    if (!(na > 0.0) || !(nb > 0.0))
    {
        throw DomainError("angle: zero vector");
    }
    const double c = std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
    return std::acos(c);
}

double theta12(const FreqPoint& X1, const FreqPoint& X2, Sign s1, Sign s2)
{
    if (X1.xi == Vec2{} || X2.xi == Vec2{})
    {
        throw DomainError("theta12: zero spatial frequency");
    }
    return angle(value(s1) * X1.xi, value(s2) * X2.xi);
}

double hyperbolic_weight(const FreqPoint& X, Sign s) noexcept
{
    return -X.tau + value(s) * norm(X.xi);
}

OutputClass classify_output(double n0, double n1, double n2)
{
    if (!(n0 > 0.0) || !(n1 > 0.0) || !(n2 > 0.0))
    {
        throw DomainError("classify_output: frequencies must be positive");
    }
    return n0 <= kLowOutputRatio * std::max(n1, n2) ? OutputClass::LowOutput
                                                    : OutputClass::HighOutput;
}

// -- Region construction -----------------------------------------------------

Region Region::cone_ball(Sign s, double N, double L)
{
    require_positive(N, "cone_ball N");
    require_positive(L, "cone_ball L", true);
    return Region(shape::ConeBall{s, N, L});
}

Region Region::cone_annulus(Sign s, double N, double L)
{
    require_positive(N, "cone_annulus N");
    require_positive(L, "cone_annulus L", true);
    return Region(shape::ConeAnnulus{s, N, L});
}

Region Region::cone_sector(Sign s, double N, double L, double gamma, Vec2 omega)
{
    require_positive(N, "cone_sector N");
    require_positive(L, "cone_sector L", true);
    if (!(gamma > 0.0 && gamma <= std::numbers::pi))
    {
        throw DomainError("cone_sector: gamma must lie in (0, pi]");
    }
    require_unit(omega, "cone_sector");
    return Region(shape::ConeSector{s, N, L, gamma, omega});
}

Region Region::spatial_strip(double r, Vec2 omega)
{
    require_positive(r, "spatial_strip r");
    require_unit(omega, "spatial_strip");
    return Region(shape::SpatialStrip{r, omega});
}

Region Region::slab(Vec2 omega, Interval interval)
{
    require_unit(omega, "slab");
    require_interval(interval, "slab");
    return Region(shape::Slab{omega, interval});
}

Region Region::null_slab(double d, Vec2 omega)
{
    require_positive(d, "null_slab d");
    require_unit(omega, "null_slab");
    return Region(shape::NullSlab{d, omega});
}

Region Region::spatial_ball(Vec2 center, double radius)
{
    require_positive(radius, "spatial_ball radius");
    if (!std::isfinite(center.x) || !std::isfinite(center.y))
    {
        throw DomainError("spatial_ball: center must be finite");
    }
    return Region(shape::SpatialBall{center, radius});
}

Region Region::box(const Box& b)
{
    require_interval(b.tau, "box tau");
    require_interval(b.xi1, "box xi1");
    require_interval(b.xi2, "box xi2");
    return Region(b);
}

Region Region::translate(const FreqPoint& offset, Region inner)
{
    if (!std::isfinite(offset.tau) || !std::isfinite(offset.xi.x) || !std::isfinite(offset.xi.y))
    {
        throw DomainError("translate: offset must be finite");
    }
    return Region(shape::Translate{offset, std::make_shared<const Region>(std::move(inner))});
}

Region Region::reflect(Region inner)
{
    return Region(shape::Reflect{std::make_shared<const Region>(std::move(inner))});
}

Region Region::intersect(std::vector<Region> items)
{
    if (items.empty())
    {
        throw DomainError("intersect: needs at least one item");
    }
    return Region(shape::Intersect{std::move(items)});
}

std::string Region::type_name() const
{
    return std::visit(Overloaded{
                          [](const shape::ConeBall&) { return "cone_ball"; },
                          [](const shape::ConeAnnulus&) { return "cone_annulus"; },
                          [](const shape::ConeSector&) { return "cone_sector"; },
                          [](const shape::SpatialStrip&) { return "spatial_strip"; },
                          [](const shape::Slab&) { return "slab"; },
                          [](const shape::NullSlab&) { return "null_slab"; },
                          [](const shape::SpatialBall&) { return "spatial_ball"; },
                          [](const Box&) { return "box"; },
                          [](const shape::Translate&) { return "translate"; },
                          [](const shape::Reflect&) { return "reflect"; },
                          [](const shape::Intersect&) { return "intersect"; },
                      },
                      shape_);
}

// -- membership --------------------------------------------------------------

double membership_slack(const Region& R, const FreqPoint& X)
{
    return std::visit(
        Overloaded{
            [&](const shape::ConeBall& c) {
                return std::min(2.0 * c.N - norm(X.xi), cone_slack(c.sign, c.L, X));
            },
            [&](const shape::ConeAnnulus& c) {
                const double r = norm(X.xi);
                return std::min({r - c.N, 2.0 * c.N - r, cone_slack(c.sign, c.L, X)});
            },
            [&](const shape::ConeSector& c) {
                const double r = norm(X.xi);
                double s = std::min({r - c.N, 2.0 * c.N - r, cone_slack(c.sign, c.L, X)});
                if (r > 0.0)
                {
                    s = std::min(s, c.gamma - angle(value(c.sign) * X.xi, c.omega));
                }
                return s;
            },
            [&](const shape::SpatialStrip& s) {
                return 0.5 * s.r - std::abs(dot(X.xi, perp(s.omega)));
            },
            [&](const shape::Slab& s) {
                const double v = dot(X.xi, s.omega);
                return std::min(v - s.interval.lo, s.interval.hi - v);
            },
            [&](const shape::NullSlab& s) { return s.d - std::abs(-X.tau + dot(X.xi, s.omega)); },
            [&](const shape::SpatialBall& b) { return b.radius - norm(X.xi - b.center); },
            [&](const Box& b) {
                return std::min({X.tau - b.tau.lo, b.tau.hi - X.tau, X.xi.x - b.xi1.lo,
                                 b.xi1.hi - X.xi.x, X.xi.y - b.xi2.lo, b.xi2.hi - X.xi.y});
            },
            [&](const shape::Translate& t) { return membership_slack(*t.inner, X - t.offset); },
            [&](const shape::Reflect& r) { return membership_slack(*r.inner, -X); },
            [&](const shape::Intersect& in) {
                double s = kInf;
                for (const auto& item : in.items)
                {
                    s = std::min(s, membership_slack(item, X));
                }
                return s;
            },
        },
        R.shape());
}

bool contains(const Region& R, const FreqPoint& X)
{
    return std::visit(
        Overloaded{
            [&](const shape::ConeBall& c) {
                return norm(X.xi) <= 2.0 * c.N && cone_slack(c.sign, c.L, X) >= 0.0;
            },
            [&](const shape::ConeAnnulus& c) {
                const double r = norm(X.xi);
                return c.N <= r && r < 2.0 * c.N && cone_slack(c.sign, c.L, X) >= 0.0;
            },
            [&](const shape::ConeSector& c) {
                const double r = norm(X.xi);
                return c.N <= r && r < 2.0 * c.N && cone_slack(c.sign, c.L, X) >= 0.0
                       && angle(value(c.sign) * X.xi, c.omega) <= c.gamma;
            },
            [&](const shape::SpatialStrip& s) {
                return std::abs(dot(X.xi, perp(s.omega))) <= 0.5 * s.r;
            },
            [&](const shape::Slab& s) { return s.interval.contains(dot(X.xi, s.omega)); },
            [&](const shape::NullSlab& s) { return std::abs(-X.tau + dot(X.xi, s.omega)) <= s.d; },
            [&](const shape::SpatialBall& b) { return norm(X.xi - b.center) <= b.radius; },
            [&](const Box& b) { return b.contains(X); },
            [&](const shape::Translate& t) { return contains(*t.inner, X - t.offset); },
            [&](const shape::Reflect& r) { return contains(*r.inner, -X); },
            [&](const shape::Intersect& in) {
                return std::all_of(in.items.begin(), in.items.end(),
                                   [&](const Region& item) { return contains(item, X); });
            },
        },
        R.shape());
}

// -- bounding boxes ----------------------------------------------------------

namespace {

Interval cone_tau_range(Sign s, double r_lo, double r_hi, double L)
{
    if (s == Sign::Plus)
    {
        return {r_lo - L, r_hi + L};
    }
    return {-r_hi - L, -r_lo + L};
}

// xi-extent of {s * rho * (cos phi, sin phi) : rho in [r_lo, r_hi],
// |phi - phi0| <= gamma}.
std::pair<Interval, Interval> sector_xi_box(Sign s, double r_lo, double r_hi, double gamma, Vec2 omega)
{
    if (gamma >= std::numbers::pi)
    {
        return {{-r_hi, r_hi}, {-r_hi, r_hi}};
    }
    const Vec2 dir = value(s) * omega;
    const double phi0 = std::atan2(dir.y, dir.x);
    std::vector<double> phis{phi0 - gamma, phi0 + gamma};
    for (int k = -8; k <= 8; ++k)
    {
        const double p = k * 0.5 * std::numbers::pi;
        if (p > phi0 - gamma && p < phi0 + gamma)
        {
            phis.push_back(p);
        }
    }
    Interval bx{kInf, -kInf};
    Interval by{kInf, -kInf};
    for (double p : phis)
    {
        for (double rho : {r_lo, r_hi})
        {
            const Vec2 v = rho * unit_at(p);
            bx = {std::min(bx.lo, v.x), std::max(bx.hi, v.x)};
            by = {std::min(by.lo, v.y), std::max(by.hi, v.y)};
        }
    }
    return {bx, by};
}

Box unbounded_box()
{
    return {{-kInf, kInf}, {-kInf, kInf}, {-kInf, kInf}};
}

bool axis_aligned(Vec2 omega, int& axis, double& sgn)
{
    constexpr double tol = 1e-15;
    if (std::abs(omega.y) <= tol)
    {
        axis = 1;
        sgn = omega.x > 0 ? 1.0 : -1.0;
        return true;
    }
    if (std::abs(omega.x) <= tol)
    {
        axis = 2;
        sgn = omega.y > 0 ? 1.0 : -1.0;
        return true;
    }
    return false;
}

// Box, or an unbounded box plus the name of what made it unbounded.
struct PartialBox
{
    Box box;
    std::string unbounded_factor;
};

PartialBox partial_box(const Region& R);

// Tightening of a known box by an unbounded factor.
void tighten(Box& b, const Region& R)
{
    std::visit(Overloaded{
                   [&](const shape::SpatialStrip& s) {
                       int axis;
                       double sgn;
                       // A strip along xi1 bounds xi2 and vice versa.
                       if (axis_aligned(s.omega, axis, sgn))
                       {
                           Interval& I = b.axis(axis == 1 ? 2 : 1);
                           I = intersect(I, Interval{-0.5 * s.r, 0.5 * s.r});
                       }
                   },
                   [&](const shape::Slab& s) {
                       int axis;
                       double sgn;
                       if (axis_aligned(s.omega, axis, sgn))
                       {
                           const Interval I = sgn > 0 ? s.interval
                                                      : Interval{-s.interval.hi, -s.interval.lo};
                           b.axis(axis) = intersect(b.axis(axis), I);
                       }
                   },
                   [&](const shape::SpatialBall& ball) {
                       b.xi1 = intersect(b.xi1, {ball.center.x - ball.radius, ball.center.x + ball.radius});
                       b.xi2 = intersect(b.xi2, {ball.center.y - ball.radius, ball.center.y + ball.radius});
                   },
                   [&](const shape::NullSlab& s) {
                       if (!std::isfinite(b.xi1.length()) || !std::isfinite(b.xi2.length()))
                       {
                           return;
                       }
                       double lo = kInf, hi = -kInf;
                       for (double x : {b.xi1.lo, b.xi1.hi})
                       {
                           for (double y : {b.xi2.lo, b.xi2.hi})
                           {
                               const double v = dot(Vec2{x, y}, s.omega);
                               lo = std::min(lo, v);
                               hi = std::max(hi, v);
                           }
                       }
                       b.tau = intersect(b.tau, {lo - s.d, hi + s.d});
                   },
                   [&](const auto&) {},
               },
               R.shape());
}

bool is_unbounded_primitive(const Region& R)
{
    return std::holds_alternative<shape::SpatialStrip>(R.shape())
           || std::holds_alternative<shape::Slab>(R.shape())
           || std::holds_alternative<shape::NullSlab>(R.shape())
           || std::holds_alternative<shape::SpatialBall>(R.shape());
}

PartialBox cone_box(Sign s, double N, double L, const char* name, double r_lo, double r_hi,
                    std::pair<Interval, Interval> xi)
{
    if (std::isinf(L))
    {
        Box b = unbounded_box();
        b.xi1 = xi.first;
        b.xi2 = xi.second;
        return {b, std::string(name) + " with infinite L"};
    }
    (void)N;
    return {{cone_tau_range(s, r_lo, r_hi, L), xi.first, xi.second}, {}};
}

PartialBox partial_box(const Region& R)
{
    return std::visit(
        Overloaded{
            [&](const shape::ConeBall& c) {
                return cone_box(c.sign, c.N, c.L, "cone_ball", 0.0, 2.0 * c.N,
                                {{-2.0 * c.N, 2.0 * c.N}, {-2.0 * c.N, 2.0 * c.N}});
            },
            [&](const shape::ConeAnnulus& c) {
                return cone_box(c.sign, c.N, c.L, "cone_annulus", c.N, 2.0 * c.N,
                                {{-2.0 * c.N, 2.0 * c.N}, {-2.0 * c.N, 2.0 * c.N}});
            },
            [&](const shape::ConeSector& c) {
                return cone_box(c.sign, c.N, c.L, "cone_sector", c.N, 2.0 * c.N,
                                sector_xi_box(c.sign, c.N, 2.0 * c.N, c.gamma, c.omega));
            },
            [&](const shape::SpatialStrip&) { return PartialBox{unbounded_box(), "spatial_strip"}; },
            [&](const shape::Slab&) { return PartialBox{unbounded_box(), "slab"}; },
            [&](const shape::NullSlab&) { return PartialBox{unbounded_box(), "null_slab"}; },
            [&](const shape::SpatialBall& ball) {
                Box b = unbounded_box();
                tighten(b, R);
                (void)ball;
                return PartialBox{b, "spatial_ball (tau unbounded)"};
            },
            [&](const Box& b) { return PartialBox{b, {}}; },
            [&](const shape::Translate& t) {
                PartialBox in = partial_box(*t.inner);
                Box& b = in.box;
                b.tau = {b.tau.lo + t.offset.tau, b.tau.hi + t.offset.tau};
                b.xi1 = {b.xi1.lo + t.offset.xi.x, b.xi1.hi + t.offset.xi.x};
                b.xi2 = {b.xi2.lo + t.offset.xi.y, b.xi2.hi + t.offset.xi.y};
                return in;
            },
            [&](const shape::Reflect& r) {
                PartialBox in = partial_box(*r.inner);
                Box& b = in.box;
                b.tau = {-b.tau.hi, -b.tau.lo};
                b.xi1 = {-b.xi1.hi, -b.xi1.lo};
                b.xi2 = {-b.xi2.hi, -b.xi2.lo};
                return in;
            },
            [&](const shape::Intersect& in) {
                Box b = unbounded_box();
                std::vector<std::string> open;
                for (const auto& item : in.items)
                {
                    if (!is_unbounded_primitive(item))
                    {
                        PartialBox p = partial_box(item);
                        b = intersect(b, p.box);
                    }
                }
                // Two passes so a slab-tightened xi box can then bound tau.
                for (int pass = 0; pass < 2; ++pass)
                {
                    for (const auto& item : in.items)
                    {
                        if (is_unbounded_primitive(item))
                        {
                            tighten(b, item);
                        }
                    }
                }
                PartialBox out{b, {}};
                if (!b.bounded() && !b.empty())
                {
                    std::ostringstream os;
                    os << "intersect(";
                    for (std::size_t i = 0; i < in.items.size(); ++i)
                    {
                        os << (i ? "," : "") << in.items[i].type_name();
                    }
                    os << ")";
                    out.unbounded_factor = os.str();
                }
                return out;
            },
        },
        R.shape());
}

} // namespace

Box bounding_box(const Region& R)
{
    PartialBox p = partial_box(R);
    if (p.box.empty())
    {
        return p.box;
    }
    if (!p.box.bounded())
    {
        throw DomainError("bounding_box: unbounded region: "
                          + (p.unbounded_factor.empty() ? R.type_name() : p.unbounded_factor));
    }
    return p.box;
}

Region rotated(const Region& R, double a)
{
    return std::visit(
        Overloaded{
            [&](const shape::ConeBall&) { return R; },
            [&](const shape::ConeAnnulus&) { return R; },
            [&](const shape::ConeSector& c) {
                Vec2 w = rotate(c.omega, a);
                w = w * (1.0 / norm(w));
                return Region::cone_sector(c.sign, c.N, c.L, c.gamma, w);
            },
            [&](const shape::SpatialStrip& s) { return Region::spatial_strip(s.r, rotate(s.omega, a)); },
            [&](const shape::Slab& s) { return Region::slab(rotate(s.omega, a), s.interval); },
            [&](const shape::NullSlab& s) { return Region::null_slab(s.d, rotate(s.omega, a)); },
            [&](const shape::SpatialBall& b) {
                return Region::spatial_ball(rotate(b.center, a), b.radius);
            },
            [&](const Box&) -> Region {
                throw DomainError("rotated: boxes are not rotation covariant");
            },
            [&](const shape::Translate& t) {
                return Region::translate({t.offset.tau, rotate(t.offset.xi, a)}, rotated(*t.inner, a));
            },
            [&](const shape::Reflect& r) { return Region::reflect(rotated(*r.inner, a)); },
            [&](const shape::Intersect& in) {
                std::vector<Region> items;
                items.reserve(in.items.size());
                for (const auto& item : in.items)
                {
                    items.push_back(rotated(item, a));
                }
                return Region::intersect(std::move(items));
            },
        },
        R.shape());
}

} // namespace conelab
