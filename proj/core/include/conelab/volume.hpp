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
#include <string>

#include <nlohmann/json.hpp>

#include "conelab/geometry.hpp"

namespace conelab {

enum class VolumeMethod { MonteCarlo, SliceExact, SliceMc };

std::string to_string(VolumeMethod m);

struct VolumeEstimate
{
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    VolumeMethod method = VolumeMethod::MonteCarlo;
};

nlohmann::json to_json(const VolumeEstimate& v);

/// Default multiplicative slack allowed in lemma bound checks.
inline constexpr double kBoundTolerance = 8.0;
inline constexpr std::int64_t kMinMcSamples = 1000;

/**
 * Hit-or-miss estimate of |R| using n uniform points of box. Point i is
 * drawn from CounterRng(seed) at counter i, so the estimate is a pure
 * function of (R, box, n, seed) whatever the thread count.
 */
VolumeEstimate mc_volume(const Region& R, const Box& box, std::int64_t n, std::uint64_t seed);

// -- planar areas ------------------------------------------------------------

/// Area of the intersection of disks with radii r1, r2 whose centres are d apart.
double disk_lens_area(double r1, double r2, double d) noexcept;

/// Closed radial band lo <= |xi| <= hi; empty when lo > hi. lo = 0 is a disk.
struct RadialBand
{
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const noexcept { return !(lo <= hi) || hi <= 0.0; }
};

/// |{lo_a <= |xi| <= hi_a} ∩ {lo_b <= |xi - xi0| <= hi_b}| with |xi0| = dist.
double band_pair_area(RadialBand a, RadialBand b, double dist) noexcept;

/// Two thickened circles, {r - delta <= |xi| <= r + delta} and the translate by
/// xi0 (|xi0| = dist) of {Rr - Delta <= |xi| <= Rr + Delta}.
struct CircleConfig
{
    double r = 1.0;
    double delta = 0.01;
    double Rr = 1.0;
    double Delta = 0.01;
    double dist = 1.0;

    /// Throws DomainError unless delta <= r/10, Delta <= Rr/10, dist > 0.
    void validate_lemma() const;
};

double annuli_intersection_area(const CircleConfig& c);

/// Planar hit-or-miss oracle for annuli_intersection_area.
VolumeEstimate mc_annuli_area(const CircleConfig& c, std::int64_t n, std::uint64_t seed);

/// [r R delta Delta min(delta, Delta) / dist]^{1/2}.
double circle_lemma_bound(const CircleConfig& c);

struct StripCircleArea
{
    double exact;
    double bound20; ///< delta (r (b - a))^{1/2}
    double bound22; ///< (b - a) (r delta)^{1/2}
};

/// Area of the thickened circle of radius r, half-width delta, inside a < xi1 < b.
StripCircleArea strip_circle_area(double r, double delta, double a, double b);

// -- cone shells and tau-slices ---------------------------------------------

/**
 * Radially symmetric thickened cone: r_lo <= |xi| <= r_hi and
 * |tau - s|xi|| <= L. Covers both ConeBall (r_lo = 0) and ConeAnnulus.
 */
struct ConeShell
{
    Sign sign = Sign::Plus;
    double r_lo = 0.0;
    double r_hi = 2.0;
    double L = 0.1;

    static ConeShell ball(Sign s, double N, double L) noexcept { return {s, 0.0, 2.0 * N, L}; }
    static ConeShell annulus(Sign s, double N, double L) noexcept { return {s, N, 2.0 * N, L}; }
    /// From a cone_ball or cone_annulus region; DomainError otherwise.
    static ConeShell from_region(const Region& R);

    RadialBand band_at(double tau) const noexcept;
    Interval tau_range() const noexcept;
};

/// tau-slice integration controls. The grid doubles from `slices` until the
/// relative change drops below `rel_change` or `max_slices` is reached.
struct SliceOptions
{
    int slices = 2048;
    double rel_change = 5e-3;
    int max_slices = 65536;
    bool converge = true;
};

/**
 * |A ∩ (X0 + sigma B)| by midpoint integration over tau of exact slice
 * areas. A is centred at the origin; B is reflected when sigma = -1.
 */
double shell_pair_volume(const ConeShell& A, const ConeShell& B, const FreqPoint& X0, int sigma,
                         const SliceOptions& opt = {});

/// E = K̇1 ∩ (X0 − K̇2) for the input legs of p.
VolumeEstimate e_set_volume(const DyadicParams& p, const FreqPoint& X0, VolumeMethod method,
                            std::int64_t n_mc = 200000, std::uint64_t seed = 42);

/// The three sup terms in the volume bound for a bilinear estimate, named by
/// the set the translate X ranges over.
enum class PairSelector
{
    Output, ///< sup_{X in A0} |A1 ∩ (X − A2)|
    Second, ///< sup_{X in A2} |A0 ∩ (X + A1)|
    First,  ///< sup_{X in A1} |A0 ∩ (X + A2)|
};

std::string to_string(PairSelector s);

struct SupSearchOptions
{
    int grid_rho = 64;
    int grid_tau = 64;
    int coarse_slices = 64;
    int refine_slices = 256;
    int refine_candidates = 3;
    int golden_iterations = 24;
    SliceOptions final_slices{};
};

struct SupResult
{
    double value = 0.0;
    FreqPoint argmax;
};

/// A_j = K̇^{±j}_{N_j,L_j}; searches X = (tau, (rho, 0)) by grid + golden section.
SupResult sup_pair_volume(const DyadicParams& p, PairSelector which, const SupSearchOptions& opt = {});

struct BilinearVolumeConstant
{
    double constant = 0.0; ///< sqrt of the smallest sup
    SupResult sups[3];     ///< indexed by PairSelector
    PairSelector attained = PairSelector::Output;
};

BilinearVolumeConstant bilinear_constant_volume(const DyadicParams& p, const SupSearchOptions& opt = {});

/**
 * |A1 ∩ (X − A2) ∩ (Xlat + A0)| by Monte Carlo, with A_j = K̇^{±j} for j = 1, 2.
 * A0 must be an approximate tiling set (a box, a finite-thickness cone region,
 * or a bounded intersection containing a null slab); nullptr stands for all
 * of frequency space.
 */
VolumeEstimate triple_intersection_volume(const DyadicParams& p, const FreqPoint& X, const FreqPoint& Xlat,
                                          const Region* A0, std::int64_t n = 200000,
                                          std::uint64_t seed = 42);

/// Side lengths of the lattice used to tile by translates of A0.
Box tiling_cell(const Region& A0);

} // namespace conelab
