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
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conelab/geometry.hpp"

namespace conelab {

/// Regular grid of cells over (tau, xi1, xi2). Cell (i0, i1, i2) has centre
/// lo + (i + 1/2) h, and index (i0 * n1 + i1) * n2 + i2.
struct Lattice
{
    std::array<double, 3> lo{};
    std::array<double, 3> h{1.0, 1.0, 1.0};
    std::array<int, 3> dims{8, 8, 8};

    Box extents() const noexcept;
    double cell_volume() const noexcept { return h[0] * h[1] * h[2]; }
    std::size_t size() const noexcept
    {
        return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1])
               * static_cast<std::size_t>(dims[2]);
    }
    std::size_t index(int i0, int i1, int i2) const noexcept
    {
        return (static_cast<std::size_t>(i0) * static_cast<std::size_t>(dims[1]) + static_cast<std::size_t>(i1))
                   * static_cast<std::size_t>(dims[2])
               + static_cast<std::size_t>(i2);
    }
    std::array<int, 3> unravel(std::size_t idx) const noexcept;
    FreqPoint center(int i0, int i1, int i2) const noexcept
    {
        return {lo[0] + (i0 + 0.5) * h[0], {lo[1] + (i1 + 0.5) * h[1], lo[2] + (i2 + 0.5) * h[2]}};
    }
    FreqPoint center(std::size_t idx) const noexcept;
    bool same_spacing(const Lattice& o) const noexcept;
};

/// Cells tiling box exactly; each dim must lie in [8, 1024].
Lattice make_lattice(const Box& box, std::array<int, 3> dims);

/// Smallest lattice with spacing h whose corner sits on the grid h Z^3 and
/// whose cells cover box. Lattices built this way from one h share cell centres.
Lattice lattice_with_spacing(const Box& box, std::array<double, 3> h);

struct GridFunction
{
    Lattice lattice;
    std::vector<std::complex<double>> values;
    std::vector<std::uint8_t> mask;

    static GridFunction zeros(const Lattice& lat);
    std::size_t support_size() const noexcept;
    /// Throws DomainError if a value is nonzero off the mask or non-finite.
    void check_invariants() const;
};

GridFunction indicator_function(const Region& R, const Lattice& lat);

/// f times the indicator of R (cell centres); the mask shrinks accordingly.
GridFunction restrict_to(const GridFunction& f, const Region& R);

double l2_norm(const GridFunction& f);

/// Same values on a lattice moved by the given whole-cell offsets.
GridFunction shift(const GridFunction& f, std::array<int, 3> cells);

enum class ConvolutionMethod { Automatic, Direct, Fft };

/**
 * Riemann-sum convolution on the sum lattice (corner lo1 + lo2 + h/2, dims
 * n1 + n2 − 1). Direct sums over support pairs; Fft uses FFTW on zero-padded
 * arrays. Automatic picks Direct for small support products.
 */
GridFunction convolve(const GridFunction& f1, const GridFunction& f2,
                      ConvolutionMethod method = ConvolutionMethod::Automatic);

/// X -> conj f(−X) on the reflected lattice.
GridFunction reflect_conj(const GridFunction& f);

/// Values of g on the cells of target (aligned, same spacing); zero outside g.
GridFunction resample_aligned(const GridFunction& g, const Lattice& target);

/// || χ_{A0} (f1 ∗ f2) ||.
double restricted_product_norm(const GridFunction& f1, const GridFunction& f2, const Region& A0);

/// Squared L2 norm of f over the cells whose centres lie in R.
double restricted_energy(const GridFunction& f, const Region& R);

/// max over c of the energy of f in {c <= xi . omega <= c + length}.
double max_slab_energy(const GridFunction& f, Vec2 omega, double length);

// -- null forms --------------------------------------------------------------

enum class NullFormPower { One, IndicatorSmall };

/// θ12 cutoff for the small-angle null form.
inline constexpr double kSmallAngleCutoff = 0.125;
inline constexpr std::size_t kNullFormSupportLimit = 100000;

/// Sum over support pairs of f1(X1) f2(X2) w(θ12) into the sum lattice.
GridFunction nullform_grid(const GridFunction& f1, const GridFunction& f2, Sign s1, Sign s2,
                           NullFormPower power = NullFormPower::One);

double nullform_direct(const GridFunction& f1, const GridFunction& f2, Sign s1, Sign s2, const Region& A0,
                       NullFormPower power = NullFormPower::One);

/**
 * Whitney approximation of the null form: cells are assigned to their nearest
 * direction of Ω(γ) at each dyadic γ in [gamma_min, 1/2]; a pair of pieces with
 * 3γ <= θ(ω1, ω2) <= 12γ contributes θ(ω1, ω2) divided by the number of dyadic
 * scales whose band contains that angle. Pairs never separated by the finest
 * band are weighted by gamma_min.
 */
GridFunction nullform_sectored_grid(const GridFunction& f1, const GridFunction& f2, Sign s1, Sign s2,
                                    double gamma_min);

double nullform_sectored(const GridFunction& f1, const GridFunction& f2, Sign s1, Sign s2, const Region& A0,
                         double gamma_min);

/// Finest angle resolvable on the supports: max over both of h_xi / min |xi|.
double angular_resolution(const GridFunction& f1, const GridFunction& f2);

/**
 * (N/r)^{1/2} max over ω of || f restricted to {N <= |ξ| < 2N} ∩ T_r(ω) ||.
 * The sup runs over Ω(r / (4N)), fine enough that the strips cover the annulus.
 */
double anisotropic_norm(const GridFunction& f, double N, double r);

// -- packets -----------------------------------------------------------------

enum class PacketKind { Indicator, KnappCap, NullRay };

std::string to_string(PacketKind k);

struct PacketSpec
{
    PacketKind kind = PacketKind::Indicator;
    Sign sign = Sign::Plus;
    double N = 1.0;
    double L = 0.1;
    Vec2 omega{1.0, 0.0};
    std::optional<double> gamma; ///< overrides the Knapp angle
    std::optional<double> r;     ///< null-ray tube width (defaults to L)
};

/// Minimum number of tau-cells across a thickness L.
inline constexpr double kMinCellsPerThickness = 4.0;

/// Region a packet is the indicator of.
Region packet_region(const PacketSpec& spec);

/// Indicator of packet_region; throws if the lattice clips the support or
/// under-resolves L.
GridFunction knapp_packet(const PacketSpec& spec, const Lattice& lat);

/// Throws ResolutionError unless L spans at least kMinCellsPerThickness tau-cells.
void require_resolved(double L, const Lattice& lat);

// -- persistence -------------------------------------------------------------

/// Writes <prefix>.bin (complex64 pairs, index order) and <prefix>.json.
void export_grid_function(const GridFunction& f, const std::string& prefix, const nlohmann::json& provenance = {});
GridFunction import_grid_function(const std::string& prefix);

nlohmann::json to_json(const Lattice& lat);
Lattice lattice_from_json(const nlohmann::json& j);

} // namespace conelab
