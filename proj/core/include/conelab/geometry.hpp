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

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace conelab {

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const noexcept { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const noexcept { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const noexcept { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) noexcept { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
/// Counter-clockwise quarter turn; spans the orthogonal complement of a.
constexpr Vec2 perp(Vec2 a) noexcept { return {-a.y, a.x}; }
inline Vec2 unit_at(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 rotate(Vec2 a, double angle) noexcept
{
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// A point X = (tau, xi) of 2+1 dimensional frequency space.
struct FreqPoint
{
    double tau = 0.0;
    Vec2 xi;

    constexpr FreqPoint operator+(const FreqPoint& o) const noexcept { return {tau + o.tau, xi + o.xi}; }
    constexpr FreqPoint operator-(const FreqPoint& o) const noexcept { return {tau - o.tau, xi - o.xi}; }
    constexpr FreqPoint operator-() const noexcept { return {-tau, -xi}; }
    constexpr bool operator==(const FreqPoint&) const = default;
};

enum class Sign : int { Plus = 1, Minus = -1 };

constexpr double value(Sign s) noexcept { return static_cast<double>(static_cast<int>(s)); }
constexpr Sign flip(Sign s) noexcept { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
constexpr char symbol(Sign s) noexcept { return s == Sign::Plus ? '+' : '-'; }
Sign sign_from_int(int v);

/// Closed interval [lo, hi].
struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    constexpr double length() const noexcept { return hi - lo; }
    constexpr double center() const noexcept { return 0.5 * (lo + hi); }
    constexpr bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    constexpr bool empty() const noexcept { return !(lo <= hi); }
    constexpr bool operator==(const Interval&) const = default;
};

constexpr Interval intersect(Interval a, Interval b) noexcept
{
    return {a.lo > b.lo ? a.lo : b.lo, a.hi < b.hi ? a.hi : b.hi};
}

/// Axis-aligned box in (tau, xi1, xi2).
struct Box
{
    Interval tau;
    Interval xi1;
    Interval xi2;

    bool empty() const noexcept { return tau.empty() || xi1.empty() || xi2.empty(); }
    bool bounded() const noexcept;
    double volume() const noexcept;
    bool contains(const FreqPoint& X) const noexcept
    {
        return tau.contains(X.tau) && xi1.contains(X.xi.x) && xi2.contains(X.xi.y);
    }
    const Interval& axis(int a) const noexcept { return a == 0 ? tau : (a == 1 ? xi1 : xi2); }
    Interval& axis(int a) noexcept { return a == 0 ? tau : (a == 1 ? xi1 : xi2); }
    bool operator==(const Box&) const = default;
};

Box intersect(const Box& a, const Box& b) noexcept;

/**
 * Dyadic parameters of a bilinear interaction: frequency scales N_j,
 * thicknesses L_j and cone sheets for the output (j = 0) and the two
 * inputs. L0 may be +infinity, meaning "no output hyperbolic restriction".
 */
struct DyadicParams
{
    std::array<double, 3> N{1.0, 1.0, 1.0};
    std::array<double, 3> L{std::numeric_limits<double>::infinity(), 0.1, 0.1};
    std::array<Sign, 3> signs{Sign::Plus, Sign::Plus, Sign::Plus};

    /// Throws DomainError unless every N is positive and finite, L1 and L2
    /// are positive and finite, and L0 is positive (possibly infinite).
    void validate() const;

    double n012_min() const noexcept;
    double n12_min() const noexcept;
    double n12_max() const noexcept;
    /// min(N0, Nj) for j in {1, 2}.
    double n0j_min(int j) const noexcept;
    double l12_min() const noexcept;
    double l12_max() const noexcept;
    double l0j_min(int j) const noexcept;
    double l0j_max(int j) const noexcept;
    double l012_min() const noexcept;
    double l012_med() const noexcept;
    double l012_max() const noexcept;
};

// -- angles and weights ------------------------------------------------------

/// Angle in [0, pi] between nonzero a and b (clamped arccos).
double angle(Vec2 a, Vec2 b);

/// theta_12 = angle(s1 xi1, s2 xi2).
double theta12(const FreqPoint& X1, const FreqPoint& X2, Sign s1, Sign s2);

/// -tau + s |xi|.
double hyperbolic_weight(const FreqPoint& X, Sign s) noexcept;

enum class OutputClass { LowOutput, HighOutput };

/// Ratio n0 / max(n1, n2) at or below which an interaction is low output.
inline constexpr double kLowOutputRatio = 0.25;

OutputClass classify_output(double n0, double n1, double n2);

// -- regions -----------------------------------------------------------------

class Region;

namespace shape {

/// |xi| <= 2N, |tau - s|xi|| <= L.
struct ConeBall
{
    Sign sign;
    double N;
    double L;
};

/// N <= |xi| < 2N, |tau - s|xi|| <= L.
struct ConeAnnulus
{
    Sign sign;
    double N;
    double L;
};

/// ConeAnnulus with angle(s xi, omega) <= gamma.
struct ConeSector
{
    Sign sign;
    double N;
    double L;
    double gamma;
    Vec2 omega;
};

/// |xi . omega_perp| <= r/2: the strip of width r centred on the line R omega.
struct SpatialStrip
{
    double r;
    Vec2 omega;
};

/// xi . omega in I.
struct Slab
{
    Vec2 omega;
    Interval interval;
};

/// |-tau + xi . omega| <= d, a thickened null hyperplane.
struct NullSlab
{
    double d;
    Vec2 omega;
};

/// |xi - center| <= radius, any tau.
struct SpatialBall
{
    Vec2 center;
    double radius;
};

struct Translate
{
    FreqPoint offset;
    std::shared_ptr<const Region> inner;
};

struct Reflect
{
    std::shared_ptr<const Region> inner;
};

struct Intersect
{
    std::vector<Region> items;
};

} // namespace shape

/**
 * Measurable subset of frequency space, built from cone, sector, strip,
 * slab and ball primitives and closed under translation, reflection
 * X -> -X and finite intersection. Immutable; copying shares subtrees.
 */
class Region
{
public:
    using Variant = std::variant<shape::ConeBall, shape::ConeAnnulus, shape::ConeSector,
                                 shape::SpatialStrip, shape::Slab, shape::NullSlab,
                                 shape::SpatialBall, Box, shape::Translate, shape::Reflect,
                                 shape::Intersect>;

    static Region cone_ball(Sign s, double N, double L);
    static Region cone_annulus(Sign s, double N, double L);
    static Region cone_sector(Sign s, double N, double L, double gamma, Vec2 omega);
    static Region spatial_strip(double r, Vec2 omega);
    static Region slab(Vec2 omega, Interval interval);
    static Region null_slab(double d, Vec2 omega);
    static Region spatial_ball(Vec2 center, double radius);
    static Region box(const Box& b);
    static Region translate(const FreqPoint& offset, Region inner);
    static Region reflect(Region inner);
    static Region intersect(std::vector<Region> items);

    const Variant& shape() const noexcept { return shape_; }
    std::string type_name() const;

private:
    explicit Region(Variant v) : shape_(std::move(v)) {}
    Variant shape_;
};

/// Membership with the normalized conventions documented on each shape.
bool contains(const Region& R, const FreqPoint& X);

/**
 * Signed slack of the tightest membership constraint: positive inside,
 * negative outside, in the units of that constraint. Discontinuous only
 * where constraints switch; used to judge boundary proximity.
 */
double membership_slack(const Region& R, const FreqPoint& X);

/**
 * Box containing R. Throws DomainError naming the factor when R is an
 * unbounded primitive (strip, slab, null slab, spatial ball, cone with
 * infinite L) not intersected with something bounded. May return an empty
 * box when an intersection is provably empty.
 */
Box bounding_box(const Region& R);

/// Region with every direction parameter and offset rotated by angle.
Region rotated(const Region& R, double angle);

} // namespace conelab
