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

#include "conelab/estimates.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "conelab/error.hpp"
#include "conelab/parallel.hpp"
#include "conelab/region_json.hpp"
#include "conelab/rng.hpp"
#include "conelab/volume.hpp"

namespace conelab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct IdName
{
    EstimateId id;
    const char* name;
};

constexpr IdName kIdNames[] = {
    {EstimateId::KM_A110, "KM_A110"},         {EstimateId::KM_A112_J1, "KM_A112_J1"},
    {EstimateId::KM_A112_J2, "KM_A112_J2"},   {EstimateId::KM_A116, "KM_A116"},
    {EstimateId::L4_2D, "L4_2D"},             {EstimateId::ANISO_Z1, "ANISO_Z1"},
    {EstimateId::NULL_N2, "NULL_N2"},         {EstimateId::CONC_N4, "CONC_N4"},
    {EstimateId::LOWOUT_L1, "LOWOUT_L1"},     {EstimateId::SECTOR_C200, "SECTOR_C200"},
    {EstimateId::SECTOR_E20, "SECTOR_E20"},   {EstimateId::SECTOR_E21, "SECTOR_E21"},
    {EstimateId::SECTOR_E22, "SECTOR_E22"},   {EstimateId::SECTOR_K50, "SECTOR_K50"},
    {EstimateId::SECTOR_K52, "SECTOR_K52"},   {EstimateId::SECTOR_J200, "SECTOR_J200"},
    {EstimateId::SECTOR_J202, "SECTOR_J202"}, {EstimateId::SECTOR_J220, "SECTOR_J220"},
};

double get(const Extras& e, const std::string& key, double fallback)
{
    const auto it = e.find(key);
    return it == e.end() ? fallback : it->second;
}

} // namespace

// -- catalog -----------------------------------------------------------------

std::string to_string(EstimateId id)
{
    for (const auto& n : kIdNames)
    {
        if (n.id == id)
        {
            return n.name;
        }
    }
    return "unknown";
}

EstimateId estimate_id_from_string(const std::string& name)
{
    for (const auto& n : kIdNames)
    {
        if (name == n.name)
        {
            return n.id;
        }
    }
    throw ParseError("unknown estimate id '" + name + "'");
}

const std::vector<EstimateId>& all_estimate_ids()
{
    static const std::vector<EstimateId> ids = [] {
        std::vector<EstimateId> v;
        for (const auto& n : kIdNames)
        {
            v.push_back(n.id);
        }
        return v;
    }();
    return ids;
}

bool is_sector_id(EstimateId id) noexcept { return static_cast<int>(id) >= static_cast<int>(EstimateId::SECTOR_C200); }

bool is_product_id(EstimateId id) noexcept
{
    return id == EstimateId::KM_A110 || id == EstimateId::KM_A112_J1 || id == EstimateId::KM_A112_J2
           || id == EstimateId::KM_A116;
}

std::vector<std::string> required_extras(EstimateId id)
{
    switch (id)
    {
    case EstimateId::ANISO_Z1: return {"I_len", "alpha"};
    case EstimateId::NULL_N2: return {"r"};
    case EstimateId::CONC_N4: return {"I_len", "r"};
    case EstimateId::SECTOR_C200: return {"gamma"};
    case EstimateId::SECTOR_E20:
    case EstimateId::SECTOR_E21:
    case EstimateId::SECTOR_E22: return {"gamma", "r"};
    case EstimateId::SECTOR_K50:
    case EstimateId::SECTOR_K52: return {"I_len", "alpha", "gamma"};
    case EstimateId::SECTOR_J200:
    case EstimateId::SECTOR_J202:
    case EstimateId::SECTOR_J220: return {"I_len", "gamma", "r"};
    default: return {};
    }
}

double homogeneity_degree(EstimateId id) noexcept { return id == EstimateId::L4_2D ? 0.75 : 1.5; }

bool is_length_extra(const std::string& key) noexcept
{
    return key == "r" || key == "I_len" || key == "I_center";
}

namespace {

void require_extras(EstimateId id, const Extras& extras)
{
    const auto keys = required_extras(id);
    std::string missing;
    for (const auto& k : keys)
    {
        if (!extras.count(k))
        {
            missing += missing.empty() ? k : ", " + k;
        }
    }
    if (!missing.empty())
    {
        std::string all;
        for (const auto& k : keys)
        {
            all += all.empty() ? k : ", " + k;
        }
        throw DomainError(to_string(id) + " requires extras {" + all + "}; missing: " + missing);
    }
    for (const auto& [k, v] : extras)
    {
        if (!std::isfinite(v))
        {
            throw DomainError("extra '" + k + "' must be finite");
        }
        if ((k == "r" || k == "I_len" || k == "alpha" || k == "gamma") && !(v > 0.0))
        {
            throw DomainError("extra '" + k + "' must be positive");
        }
    }
}

void require_finite_l0(EstimateId id, const DyadicParams& p)
{
    if (!std::isfinite(p.L[0]))
    {
        throw DomainError(to_string(id) + " needs a finite L0");
    }
}

} // namespace

double predicted_constant(EstimateId id, const DyadicParams& p, const Extras& extras)
{
    p.validate();
    require_extras(id, extras);
    const double L1 = p.L[1], L2 = p.L[2];
    const double r = get(extras, "r", 0.0);
    const double I = get(extras, "I_len", 0.0);
    const double alpha = get(extras, "alpha", 0.0);
    const double g = get(extras, "gamma", 0.0);
    switch (id)
    {
    case EstimateId::KM_A110:
        return std::sqrt(p.n012_min() * p.l12_min()) * std::pow(p.n12_min() * p.l12_max(), 0.25);
    case EstimateId::KM_A112_J1:
    case EstimateId::KM_A112_J2:
    {
        require_finite_l0(id, p);
        const int j = id == EstimateId::KM_A112_J1 ? 1 : 2;
        return std::sqrt(p.n012_min() * p.l0j_min(j)) * std::pow(p.n0j_min(j) * p.l0j_max(j), 0.25);
    }
    case EstimateId::KM_A116: return std::sqrt(p.n012_min() * p.n012_min() * p.l012_min());
    case EstimateId::L4_2D: return std::pow(p.N[1], 0.375) * std::pow(L1, 0.375);
    case EstimateId::ANISO_Z1:
        return std::sqrt(I * std::sqrt(p.n12_min()) * std::pow(L1 * L2, 0.75) / alpha);
    case EstimateId::NULL_N2:
    case EstimateId::CONC_N4: return std::sqrt(r * L1 * L2);
    case EstimateId::LOWOUT_L1:
        require_finite_l0(id, p);
        return std::sqrt(p.N[0] * p.l012_min() * std::sqrt(p.l012_med() * p.l012_max()));
    case EstimateId::SECTOR_C200: return std::sqrt(p.N[0] * L1 * L2 / g);
    case EstimateId::SECTOR_E20: return std::sqrt(r * L1 * L2 / (g * g));
    case EstimateId::SECTOR_E21: return std::sqrt(p.n12_min() * L1 * L2 / g);
    case EstimateId::SECTOR_E22: return std::sqrt(r * p.n12_min() * p.l12_min());
    case EstimateId::SECTOR_K50: return std::sqrt(I * L1 * L2 / (g * alpha));
    case EstimateId::SECTOR_K52: return std::sqrt(I * p.n12_min() * g * p.l12_min() / alpha);
    case EstimateId::SECTOR_J200: return std::sqrt(r * I * p.l12_min());
    case EstimateId::SECTOR_J202: return std::sqrt(I * L1 * L2 / g);
    case EstimateId::SECTOR_J220: return std::sqrt(r * L1 * L2 / (g * g));
    }
    throw DomainError("unknown estimate id");
}

// -- strategies --------------------------------------------------------------

std::string to_string(Strategy s)
{
    switch (s)
    {
    case Strategy::Random: return "random";
    case Strategy::Knapp: return "knapp";
    case Strategy::NullRay: return "null_ray";
    case Strategy::PowerIter: return "power_iter";
    case Strategy::VolumeRoute: return "volume_route";
    }
    return "unknown";
}

Strategy strategy_from_string(const std::string& name)
{
    for (Strategy s : {Strategy::Random, Strategy::Knapp, Strategy::NullRay, Strategy::PowerIter,
                       Strategy::VolumeRoute})
    {
        if (name == to_string(s))
        {
            return s;
        }
    }
    throw ParseError("unknown strategy '" + name + "'");
}

bool is_extremizer(Strategy s) noexcept
{
    return s == Strategy::Knapp || s == Strategy::NullRay || s == Strategy::PowerIter;
}

void check_strategy(EstimateId id, Strategy s)
{
    auto reject = [&](const std::string& why) {
        throw DomainError("strategy " + to_string(s) + " cannot test " + to_string(id) + ": " + why);
    };
    if (is_sector_id(id))
    {
        if (s != Strategy::VolumeRoute)
        {
            reject("sector estimates are checked through the volume route only");
        }
        return;
    }
    switch (s)
    {
    case Strategy::Random:
    case Strategy::Knapp: return;
    case Strategy::NullRay:
        if (id != EstimateId::LOWOUT_L1 && id != EstimateId::NULL_N2 && id != EstimateId::CONC_N4)
        {
            reject("null-ray packets violate the hypotheses or give no information here");
        }
        return;
    case Strategy::PowerIter:
        if (!is_product_id(id) && id != EstimateId::ANISO_Z1)
        {
            reject("power iteration maximizes a plain bilinear product with L2 norms on the right");
        }
        return;
    case Strategy::VolumeRoute:
        if (!is_product_id(id))
        {
            reject("the volume route covers the plain product estimates and the sector estimates");
        }
        return;
    }
}

nlohmann::json to_json(const RatioReport& r, bool timing)
{
    nlohmann::json extras = nlohmann::json::object();
    for (const auto& [k, v] : r.extras)
    {
        extras[k] = v;
    }
    return {{"id", to_string(r.id)},
            {"params", to_json(r.params)},
            {"extras", extras},
            {"predicted", r.predicted},
            {"empirical", r.empirical},
            {"ratio", r.ratio},
            {"strategy", to_string(r.strategy)},
            {"dims", r.dims},
            {"seed", r.seed},
            {"runtime_ms", timing ? r.runtime_ms : 0.0}};
}

// -- lattice-route setups ----------------------------------------------------

namespace {

enum class Form { Product, NullForm, NullSmall, Square };
enum class Denominator { Plain, AnisoSecond, SlabFirst };

/// A union of disjoint regions, rasterized as one indicator.
using Support = std::vector<Region>;

struct LatticeSetup
{
    Support S1;
    Support S2;
    std::optional<Region> A0;
    Form form = Form::Product;
    Denominator denom = Denominator::Plain;
    double aniso_r = 0.0;
    double slab_len = 0.0;
    Vec2 omega{1.0, 0.0};
};

Vec2 direction(const Extras& extras) { return unit_at(get(extras, "omega", 0.0)); }

double knapp_angle(double N, double L, const Extras& extras)
{
    return std::min(get(extras, "gamma", std::sqrt(L / N)), kPi);
}

Vec2 sector_center(Sign s, double N, Vec2 w) { return value(s) * 1.5 * N * w; }

Region centered_slab(Vec2 w, double len, double center)
{
    return Region::slab(w, {center - 0.5 * len, center + 0.5 * len});
}

void require_small_r(const DyadicParams& p, double r)
{
    if (r > kDominationFactor * p.n12_min() * (1.0 + 1e-12))
    {
        throw DomainError("hypothesis r << N12_min violated (needs r <= N12_min/8)");
    }
}

LatticeSetup build_setup(EstimateId id, const DyadicParams& p, const Extras& extras, Strategy strategy,
                         Extras& recorded)
{
    const auto [s0, s1, s2] = p.signs;
    const double N1 = p.N[1], N2 = p.N[2], L1 = p.L[1], L2 = p.L[2];
    const Vec2 w = direction(extras);
    const bool packets = strategy == Strategy::Knapp || strategy == Strategy::NullRay;
    LatticeSetup st;
    st.omega = w;

    auto cap = [&](Sign s, double N, double L, Vec2 dir) {
        const double g = knapp_angle(N, L, extras);
        return Region::cone_sector(s, N, L, g, dir);
    };
    auto ray = [&](Sign s, double N, double L, Vec2 dir, double r) {
        return packet_region({PacketKind::NullRay, s, N, L, dir, std::nullopt, r});
    };

    switch (id)
    {
    case EstimateId::KM_A110:
    case EstimateId::KM_A112_J1:
    case EstimateId::KM_A112_J2:
    case EstimateId::KM_A116:
        if (id != EstimateId::KM_A110 && id != EstimateId::KM_A116)
        {
            require_finite_l0(id, p);
        }
        st.A0 = Region::cone_ball(s0, p.N[0], p.L[0]);
        st.S1 = {packets ? cap(s1, N1, L1, w) : Region::cone_annulus(s1, N1, L1)};
        st.S2 = {packets ? cap(s2, N2, L2, w) : Region::cone_annulus(s2, N2, L2)};
        return st;
    case EstimateId::L4_2D:
        st.form = Form::Square;
        st.S1 = {packets ? cap(s1, N1, L1, w) : Region::cone_ball(s1, N1, L1)};
        st.S2 = st.S1;
        return st;
    case EstimateId::ANISO_Z1:
    {
        const double alpha = get(extras, "alpha", 0.0);
        if (alpha > kDominationFactor)
        {
            throw DomainError("ANISO_Z1 needs alpha << 1 (alpha <= 1/8)");
        }
        double center = get(extras, "I_center", 0.0);
        if (packets)
        {
            const double g = knapp_angle(N1, L1, extras);
            if (alpha + g > 0.5 * kPi)
            {
                throw DomainError("ANISO_Z1: Knapp cap does not fit outside the alpha-neighbourhood");
            }
            const Vec2 nu = rotate(w, 0.5 * kPi - alpha - g);
            st.S1 = {Region::cone_sector(s1, N1, L1, g, nu)};
            st.S2 = {cap(s2, N2, L2, nu)};
            if (!extras.count("I_center"))
            {
                center = dot(sector_center(s1, N1, nu) + sector_center(s2, N2, nu), w);
            }
        }
        else
        {
            st.S1 = {Region::cone_sector(s1, N1, L1, 0.5 * kPi - alpha, w),
                     Region::cone_sector(s1, N1, L1, 0.5 * kPi - alpha, -w)};
            st.S2 = {Region::cone_annulus(s2, N2, L2)};
        }
        recorded["I_center"] = center;
        st.A0 = centered_slab(w, get(extras, "I_len", 0.0), center);
        return st;
    }
    case EstimateId::NULL_N2:
    case EstimateId::CONC_N4:
    {
        const double r = get(extras, "r", 0.0);
        const Region strip = Region::spatial_strip(r, w);
        const double cutoff = kSmallAngleCutoff;
        if (id == EstimateId::CONC_N4)
        {
            require_small_r(p, r);
            const double len = get(extras, "I_len", 0.0);
            if (len < 8.0 * r * (1.0 - 1e-12))
            {
                throw DomainError("CONC_N4 works in the regime |I0| >= 8 r");
            }
            st.form = Form::NullSmall;
            st.denom = Denominator::SlabFirst;
            st.slab_len = len;
            recorded["cutoff"] = cutoff;
        }
        else
        {
            st.form = Form::NullForm;
        }
        if (strategy == Strategy::Random)
        {
            st.S1 = {Region::intersect({Region::cone_annulus(s1, N1, L1), strip})};
            st.S2 = {Region::cone_annulus(s2, N2, L2)};
        }
        else
        {
            // The second packet is tilted so the null-form weight is not
            // identically small.
            const double g2 = strategy == Strategy::Knapp ? knapp_angle(N2, L2, extras) : std::min(kPi, r / N2);
            double tilt = 3.0 * g2;
            if (id == EstimateId::CONC_N4)
            {
                tilt = std::min(tilt, 0.5 * cutoff);
            }
            const Vec2 w2 = rotate(w, tilt);
            if (strategy == Strategy::Knapp)
            {
                st.S1 = {Region::intersect({cap(s1, N1, L1, w), strip})};
                st.S2 = {cap(s2, N2, L2, w2)};
            }
            else
            {
                st.S1 = {Region::intersect({ray(s1, N1, L1, w, r), strip})};
                st.S2 = {ray(s2, N2, L2, w2, r)};
            }
            recorded["tilt"] = tilt;
        }
        if (id == EstimateId::CONC_N4)
        {
            double center = get(extras, "I_center", 0.0);
            if (strategy != Strategy::Random && !extras.count("I_center"))
            {
                const Vec2 w2 = rotate(w, recorded["tilt"]);
                center = dot(sector_center(s1, N1, w) + sector_center(s2, N2, w2), w);
            }
            recorded["I_center"] = center;
            st.A0 = centered_slab(w, st.slab_len, center);
        }
        return st;
    }
    case EstimateId::LOWOUT_L1:
    {
        require_finite_l0(id, p);
        if (p.N[0] > kDominationFactor * p.n12_min() * (1.0 + 1e-12) || p.n12_max() > 2.0 * p.n12_min())
        {
            throw DomainError("LOWOUT_L1 needs N0 <= min(N1, N2)/8 and N1, N2 within a factor 2");
        }
        const double r = std::sqrt(p.N[0] * p.l012_max());
        if (r > N2)
        {
            throw DomainError("LOWOUT_L1: derived r exceeds N2");
        }
        recorded["r"] = r;
        st.A0 = Region::cone_ball(s0, p.N[0], p.L[0]);
        st.denom = Denominator::AnisoSecond;
        st.aniso_r = r;
        // Sector directions refer to sign * xi, so opposite signs with one
        // direction put both packets on a null line through the origin. With
        // equal signs |tau0| = |xi1| + |xi2| and no output reaches A0; the
        // antipodal placement below only keeps xi0 small.
        const Vec2 w2 = s1 == s2 ? -w : w;
        if (strategy == Strategy::Random)
        {
            st.S1 = {Region::cone_annulus(s1, N1, L1)};
            st.S2 = {Region::cone_annulus(s2, N2, L2)};
        }
        else if (strategy == Strategy::Knapp)
        {
            st.S1 = {cap(s1, N1, L1, w)};
            st.S2 = {cap(s2, N2, L2, w2)};
        }
        else
        {
            st.S1 = {ray(s1, N1, L1, w, r)};
            st.S2 = {ray(s2, N2, L2, w2, r)};
        }
        return st;
    }
    default: break;
    }
    throw DomainError(to_string(id) + " has no lattice setup");
}

Box hull(const Box& a, const Box& b)
{
    return {{std::min(a.tau.lo, b.tau.lo), std::max(a.tau.hi, b.tau.hi)},
            {std::min(a.xi1.lo, b.xi1.lo), std::max(a.xi1.hi, b.xi1.hi)},
            {std::min(a.xi2.lo, b.xi2.lo), std::max(a.xi2.hi, b.xi2.hi)}};
}

Box support_box(const Support& S)
{
    std::optional<Box> b;
    for (const auto& R : S)
    {
        const Box rb = bounding_box(R);
        if (rb.empty())
        {
            continue;
        }
        b = b ? hull(*b, rb) : rb;
    }
    if (!b)
    {
        throw DomainError("input support is empty");
    }
    return *b;
}

GridFunction rasterize(const Support& S, const Lattice& lat, bool random, std::uint64_t seed)
{
    GridFunction f = GridFunction::zeros(lat);
    const CounterRng rng(seed);
    parallel_for(f.values.size(), [&](std::size_t i) {
        const FreqPoint X = lat.center(i);
        for (const auto& R : S)
        {
            if (contains(R, X))
            {
                f.mask[i] = 1;
                f.values[i] = random ? std::complex<double>{rng.normal(i, 0), rng.normal(i, 1)}
                                     : std::complex<double>{1.0, 0.0};
                break;
            }
        }
    });
    return f;
}

double total_energy(const GridFunction& g)
{
    const double n = l2_norm(g);
    return n * n;
}

double lattice_empirical(EstimateId id, const DyadicParams& p, const LatticeSetup& st, Strategy strategy,
                         std::array<int, 3> dims, std::uint64_t seed)
{
    const Box b1 = support_box(st.S1);
    const Box b2 = support_box(st.S2);
    std::array<double, 3> h{};
    for (int d = 0; d < 3; ++d)
    {
        if (dims[d] < 8 || dims[d] > 1024)
        {
            throw DomainError("lattice dims must lie in [8, 1024]");
        }
        h[d] = std::max(b1.axis(d).length(), b2.axis(d).length()) / dims[d];
    }
    const Lattice lat1 = lattice_with_spacing(b1, h);
    const Lattice lat2 = lattice_with_spacing(b2, h);
    require_resolved(p.L[1], lat1);
    require_resolved(p.L[2], lat2);
    if (st.A0 && std::isfinite(p.L[0]) && std::holds_alternative<shape::ConeBall>(st.A0->shape()))
    {
        require_resolved(p.L[0], lat1);
    }
    const bool random = strategy == Strategy::Random;
    const GridFunction f1 = rasterize(st.S1, lat1, random, derive_seed(seed, "f1"));
    const GridFunction f2 = st.form == Form::Square ? f1 : rasterize(st.S2, lat2, random, derive_seed(seed, "f2"));
    const double n1 = l2_norm(f1), n2 = l2_norm(f2);
    if (n1 == 0.0 || n2 == 0.0)
    {
        throw ResolutionError(to_string(id) + ": an input support contains no lattice cell centre");
    }
    GridFunction g;
    switch (st.form)
    {
    case Form::Product:
    case Form::Square: g = convolve(f1, f2); break;
    case Form::NullForm: g = nullform_grid(f1, f2, p.signs[1], p.signs[2], NullFormPower::One); break;
    case Form::NullSmall: g = nullform_grid(f1, f2, p.signs[1], p.signs[2], NullFormPower::IndicatorSmall); break;
    }
    const double energy = st.A0 ? restricted_energy(g, *st.A0) : total_energy(g);
    const double num = std::sqrt(energy);
    if (st.form == Form::Square)
    {
        return std::sqrt(num) / n1;
    }
    switch (st.denom)
    {
    case Denominator::Plain: return num / (n1 * n2);
    case Denominator::AnisoSecond: return num / (n1 * anisotropic_norm(f2, p.N[2], st.aniso_r));
    case Denominator::SlabFirst: return num / (std::sqrt(max_slab_energy(f1, st.omega, st.slab_len)) * n2);
    }
    return 0.0;
}

// -- volume route for sector estimates ---------------------------------------

struct SectorSetup
{
    Region A1;
    Region A2;
    std::optional<Region> A0;
};

SectorSetup sector_setup(EstimateId id, const DyadicParams& p, const Extras& extras, Extras& recorded)
{
    const auto [s0, s1, s2] = p.signs;
    const double N1 = p.N[1], N2 = p.N[2], L1 = p.L[1], L2 = p.L[2];
    const double g = get(extras, "gamma", 0.0);
    const double sep = get(extras, "sep", 6.0 * g);
    if (g > kDominationFactor)
    {
        throw DomainError("sector estimates need gamma << 1 (gamma <= 1/8)");
    }
    if (sep < 3.0 * g * (1.0 - 1e-12) || sep > 12.0 * g * (1.0 + 1e-12))
    {
        throw DomainError("sector separation must satisfy 3 gamma <= sep <= 12 gamma");
    }
    recorded["sep"] = sep;
    const Vec2 w = direction(extras);
    Vec2 w1 = w;
    if (id == EstimateId::SECTOR_K50 || id == EstimateId::SECTOR_K52)
    {
        const double alpha = get(extras, "alpha", 0.0);
        if (alpha + g > 0.5 * kPi)
        {
            throw DomainError("sector does not fit outside the alpha-neighbourhood");
        }
        w1 = rotate(w, 0.5 * kPi - alpha - g);
    }
    const Vec2 w2 = rotate(w1, sep);
    Region A1 = Region::cone_sector(s1, N1, L1, g, w1);
    Region A2 = Region::cone_sector(s2, N2, L2, g, w2);
    std::optional<Region> A0;
    switch (id)
    {
    case EstimateId::SECTOR_C200: A0 = Region::cone_ball(s0, p.N[0], p.L[0]); break;
    case EstimateId::SECTOR_E20:
    case EstimateId::SECTOR_E21:
    case EstimateId::SECTOR_E22:
        require_small_r(p, get(extras, "r", 0.0));
        A1 = Region::intersect({A1, Region::spatial_strip(get(extras, "r", 0.0), w1)});
        break;
    case EstimateId::SECTOR_K50:
    case EstimateId::SECTOR_K52:
    {
        const double len = get(extras, "I_len", 0.0);
        A1 = Region::intersect({A1, centered_slab(w, len, dot(sector_center(s1, N1, w1), w))});
        A2 = Region::intersect({A2, centered_slab(w, len, dot(sector_center(s2, N2, w2), w))});
        break;
    }
    case EstimateId::SECTOR_J200:
    case EstimateId::SECTOR_J202:
    case EstimateId::SECTOR_J220:
    {
        const double r = get(extras, "r", 0.0);
        require_small_r(p, r);
        A1 = Region::intersect({A1, Region::spatial_strip(r, w1)});
        const double center =
            get(extras, "I_center", dot(sector_center(s1, N1, w1) + sector_center(s2, N2, w2), w1));
        recorded["I_center"] = center;
        A0 = centered_slab(w1, get(extras, "I_len", 0.0), center);
        break;
    }
    default: throw DomainError(to_string(id) + " is not a sector estimate");
    }
    return {A1, A2, A0};
}

std::optional<FreqPoint> sample_in(const Region& R, const Box& box, const CounterRng& rng, std::uint64_t& counter)
{
    for (int tries = 0; tries < 100000; ++tries, ++counter)
    {
        const FreqPoint X{rng.uniform(counter, 0, box.tau.lo, box.tau.hi),
                          {rng.uniform(counter, 1, box.xi1.lo, box.xi1.hi),
                           rng.uniform(counter, 2, box.xi2.lo, box.xi2.hi)}};
        if (contains(R, X))
        {
            ++counter;
            return X;
        }
    }
    return std::nullopt;
}

double sector_volume_sup(const SectorSetup& st, const EmpiricalOptions& opt, std::uint64_t seed)
{
    const Box b1 = bounding_box(st.A1);
    const Box b2 = bounding_box(st.A2);
    if (b1.empty() || b2.empty())
    {
        return 0.0;
    }
    const CounterRng rng(derive_seed(seed, "candidates"));
    std::vector<FreqPoint> candidates;
    std::uint64_t counter = 0;
    for (int k = 0; k < opt.volume_candidates * 50 && static_cast<int>(candidates.size()) < opt.volume_candidates;
         ++k)
    {
        const auto X1 = sample_in(st.A1, b1, rng, counter);
        const auto X2 = sample_in(st.A2, b2, rng, counter);
        if (!X1 || !X2)
        {
            return 0.0;
        }
        const FreqPoint X0{X1->tau + X2->tau, X1->xi + X2->xi};
        if (!st.A0 || contains(*st.A0, X0))
        {
            candidates.push_back(X0);
        }
    }
    if (candidates.empty())
    {
        return 0.0;
    }
    auto volume_at = [&](const FreqPoint& X0, std::int64_t n, std::uint64_t s) {
        const Region E = Region::intersect({st.A1, Region::translate(X0, Region::reflect(st.A2))});
        const Box box = bounding_box(E);
        if (box.empty())
        {
            return 0.0;
        }
        return mc_volume(E, box, n, s).value;
    };
    std::vector<double> vols(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
        vols[i] = volume_at(candidates[i], opt.volume_samples, derive_seed(seed, static_cast<std::uint64_t>(i)));
    });
    const auto best = static_cast<std::size_t>(std::max_element(vols.begin(), vols.end()) - vols.begin());
    // Fresh samples for the winner remove the selection bias of the max.
    return volume_at(candidates[best], 4 * opt.volume_samples, derive_seed(seed, "final"));
}

double sector_empirical(EstimateId id, const DyadicParams& p, const Extras& extras, const EmpiricalOptions& opt,
                        std::uint64_t seed, Extras& recorded)
{
    const SectorSetup st = sector_setup(id, p, extras, recorded);
    const double sup = sector_volume_sup(st, opt, seed);
    if (id != EstimateId::SECTOR_J220)
    {
        return std::sqrt(sup);
    }
    // Output-slab constant A|I0| from the supremum, then C² ~ A |J| with J
    // the τ-extent of the second support.
    const double A = sup / get(extras, "I_len", 1.0);
    const double J = bounding_box(st.A2).tau.length();
    recorded["J_len"] = J;
    return std::sqrt(A * J);
}

} // namespace

RatioReport empirical_constant(EstimateId id, const DyadicParams& p, const Extras& extras, Strategy strategy,
                               std::array<int, 3> dims, std::uint64_t seed, const EmpiricalOptions& opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    check_strategy(id, strategy);
    RatioReport rep;
    rep.id = id;
    rep.params = p;
    rep.extras = extras;
    rep.strategy = strategy;
    rep.dims = dims;
    rep.seed = seed;
    rep.predicted = predicted_constant(id, p, extras);

    if (is_sector_id(id))
    {
        rep.dims = {0, 0, 0};
        rep.empirical = sector_empirical(id, p, extras, opt, seed, rep.extras);
    }
    else if (strategy == Strategy::VolumeRoute)
    {
        rep.dims = {0, 0, 0};
        rep.empirical = bilinear_constant_volume(p).constant;
    }
    else
    {
        const LatticeSetup st = build_setup(id, p, extras, strategy, rep.extras);
        if (strategy == Strategy::PowerIter)
        {
            const Box b = hull(support_box({st.S1.front()}), support_box(st.S2));
            const Lattice lat = make_lattice(b, dims);
            require_resolved(p.L[1], lat);
            require_resolved(p.L[2], lat);
            const Region A0 = st.A0 ? *st.A0 : Region::spatial_ball({0.0, 0.0}, std::numeric_limits<double>::max());
            rep.empirical =
                power_iteration_bilinear(A0, st.S1.front(), st.S2.front(), lat, opt.power_iterations, seed);
        }
        else
        {
            rep.empirical = lattice_empirical(id, p, st, strategy, dims, seed);
        }
    }
    rep.ratio = rep.empirical / rep.predicted;
    rep.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// -- power iteration ---------------------------------------------------------

namespace {

std::vector<std::uint8_t> region_mask(const Region& R, const Lattice& lat)
{
    std::vector<std::uint8_t> m(lat.size(), 0);
    parallel_for(m.size(), [&](std::size_t i) { m[i] = contains(R, lat.center(i)) ? 1 : 0; });
    return m;
}

void apply_mask(GridFunction& f, const std::vector<std::uint8_t>& m)
{
    for (std::size_t i = 0; i < f.values.size(); ++i)
    {
        if (!m[i])
        {
            f.values[i] = {};
            f.mask[i] = 0;
        }
        else
        {
            f.mask[i] = 1;
        }
    }
}

void normalize(GridFunction& f)
{
    const double n = l2_norm(f);
    for (auto& v : f.values)
    {
        v /= n;
    }
}

} // namespace

double power_iteration_bilinear(const Region& A0, const Region& A1, const Region& A2, const Lattice& lat,
                                int iters, std::uint64_t seed, std::vector<double>* history)
{
    if (iters < 2)
    {
        throw DomainError("power_iteration_bilinear: needs at least 2 iterations");
    }
    const auto m1 = region_mask(A1, lat);
    const auto m2 = region_mask(A2, lat);
    GridFunction f1 = GridFunction::zeros(lat), f2 = GridFunction::zeros(lat);
    const CounterRng r1(derive_seed(seed, "power/f1")), r2(derive_seed(seed, "power/f2"));
    for (std::size_t i = 0; i < lat.size(); ++i)
    {
        f1.values[i] = {r1.normal(i, 0), r1.normal(i, 1)};
        f2.values[i] = {r2.normal(i, 0), r2.normal(i, 1)};
    }
    apply_mask(f1, m1);
    apply_mask(f2, m2);
    if (l2_norm(f1) == 0.0 || l2_norm(f2) == 0.0)
    {
        return 0.0;
    }
    normalize(f1);
    normalize(f2);
    Lattice sum_lat = lat;
    for (int d = 0; d < 3; ++d)
    {
        sum_lat.lo[d] = 2.0 * lat.lo[d] + 0.5 * lat.h[d];
        sum_lat.dims[d] = 2 * lat.dims[d] - 1;
    }
    const auto m0 = region_mask(A0, sum_lat);

    auto forward = [&](const GridFunction& a, const GridFunction& b) {
        GridFunction g = convolve(a, b);
        apply_mask(g, m0);
        return g;
    };
    auto adjoint = [&](const GridFunction& g, const GridFunction& other, const std::vector<std::uint8_t>& m) {
        GridFunction t = resample_aligned(convolve(g, reflect_conj(other)), lat);
        apply_mask(t, m);
        return t;
    };

    double q = l2_norm(forward(f1, f2));
    if (history)
    {
        history->push_back(q);
    }
    for (int it = 0; it < iters; ++it)
    {
        for (int side = 0; side < 2; ++side)
        {
            GridFunction& x = side == 0 ? f1 : f2;
            const GridFunction& y = side == 0 ? f2 : f1;
            const GridFunction g = forward(f1, f2);
            if (l2_norm(g) == 0.0)
            {
                return 0.0;
            }
            GridFunction next = adjoint(g, y, side == 0 ? m1 : m2);
            if (l2_norm(next) == 0.0)
            {
                return 0.0;
            }
            normalize(next);
            x = std::move(next);
            const double qn = l2_norm(forward(f1, f2));
            if (qn < q * (1.0 - 1e-12))
            {
                throw std::logic_error("power iteration quotient decreased");
            }
            q = qn;
            if (history)
            {
                history->push_back(q);
            }
        }
    }
    return q;
}

// -- pointwise lemma checks --------------------------------------------------

AngleLemmaResult angle_lemma_check(const FreqPoint& X1, const FreqPoint& X2, Sign s0, Sign s1, Sign s2)
{
    const FreqPoint X0{X1.tau + X2.tau, X1.xi + X2.xi};
    const double r0 = norm(X0.xi), r1 = norm(X1.xi), r2 = norm(X2.xi);
    if (r0 == 0.0 || r1 == 0.0 || r2 == 0.0)
    {
        throw DomainError("angle_lemma_check: spatial frequencies must be nonzero");
    }
    const double h0 = std::abs(hyperbolic_weight(X0, s0));
    const double h1 = std::abs(hyperbolic_weight(X1, s1));
    const double h2 = std::abs(hyperbolic_weight(X2, s2));
    const double th = theta12(X1, X2, s1, s2);
    AngleLemmaResult res;
    res.lhs = std::max({h0, h1, h2});
    res.rhs = std::min(r1, r2) * th * th;
    res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs : kInf;
    const double h0n = std::abs(std::abs(X0.tau) - r0);
    if (h0n > 0.0 && h1 <= kDominationFactor * h0n && h2 <= kDominationFactor * h0n)
    {
        const double cmp = s1 == s2 ? std::min(r1, r2) * th * th : r1 * r2 * th * th / r0;
        res.second_part_applicable = cmp > 0.0;
        res.second_part_ratio = cmp > 0.0 ? h0n / cmp : kInf;
    }
    return res;
}

std::string to_string(Conic c) { return c == Conic::Ellipse ? "ellipse" : "hyperbola"; }

namespace {

struct ConicTerms
{
    double b2, D, D1, D2;
};

ConicTerms conic_terms(double a, double c, Conic conic, double theta)
{
    if (!(a > 0.0) || !(c >= 0.0) || !std::isfinite(a) || !std::isfinite(c))
    {
        throw DomainError("degenerate conic: need a > 0 and c >= 0");
    }
    const double e = conic == Conic::Ellipse ? -1.0 : 1.0;
    const double b2 = conic == Conic::Ellipse ? a * a - c * c : c * c - a * a;
    if (!(b2 > 0.0))
    {
        throw DomainError(conic == Conic::Ellipse ? "degenerate ellipse: need c < a"
                                                  : "degenerate hyperbola: need c > a");
    }
    const double D = a + e * c * std::cos(theta);
    if (!(D > 0.0))
    {
        throw DomainError("angle outside the conic branch");
    }
    return {b2, D, -e * c * std::sin(theta), -e * c * std::cos(theta)};
}

Vec2 conic_point(double a, double c, Conic conic, double theta)
{
    return conic_radius(a, c, conic, theta) * unit_at(theta);
}

} // namespace

double conic_radius(double a, double c, Conic conic, double theta)
{
    const ConicTerms t = conic_terms(a, c, conic, theta);
    return t.b2 / t.D;
}

double conic_curvature(double a, double c, Conic conic, double theta)
{
    const ConicTerms t = conic_terms(a, c, conic, theta);
    const double r = t.b2 / t.D;
    const double r1 = -t.b2 * t.D1 / (t.D * t.D);
    const double r2 = -t.b2 * t.D2 / (t.D * t.D) + 2.0 * t.b2 * t.D1 * t.D1 / (t.D * t.D * t.D);
    return std::abs(r * r + 2.0 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5);
}

double conic_curvature_numeric(double a, double c, Conic conic, double theta)
{
    const ConicTerms t = conic_terms(a, c, conic, theta);
    using qd = boost::multiprecision::cpp_bin_float_quad;
    const qd qa = a, qc = conic == Conic::Ellipse ? -c : c, qb2 = t.b2;
    auto point = [&](const qd& th) {
        using boost::multiprecision::cos;
        using boost::multiprecision::sin;
        const qd r = qb2 / (qa + qc * cos(th));
        return std::array<qd, 2>{r * cos(th), r * sin(th)};
    };
    // The polar radius varies on the angular scale D / c, which is tiny for
    // eccentric conics; the step follows it.
    const double scale = c > 0.0 ? std::min(1.0, t.D / c) : 1.0;
    auto derivs = [&](const qd& h) {
        const auto p = point(qd(theta)), pp = point(qd(theta) + h), pm = point(qd(theta) - h);
        std::array<qd, 4> d; // x', y', x'', y''
        for (int i = 0; i < 2; ++i)
        {
            d[i] = (pp[i] - pm[i]) / (2 * h);
            d[2 + i] = (pp[i] - 2 * p[i] + pm[i]) / (h * h);
        }
        return d;
    };
    const qd h = qd(1e-3 * scale);
    const auto c1 = derivs(h);
    const auto c2 = derivs(h / 2);
    std::array<qd, 4> d;
    for (int i = 0; i < 4; ++i)
    {
        d[i] = (4 * c2[i] - c1[i]) / 3;
    }
    const qd speed2 = d[0] * d[0] + d[1] * d[1];
    using boost::multiprecision::abs;
    using boost::multiprecision::sqrt;
    return static_cast<double>(abs(d[0] * d[3] - d[1] * d[2]) / (speed2 * sqrt(speed2)));
}

CurvatureResult curvature_check(double a, double c, Conic conic, Interval theta_range, double alpha,
                                double kappa_tol, int samples)
{
    if (samples < 1 || theta_range.empty() || !(alpha >= 0.0) || !(kappa_tol > 0.0))
    {
        throw DomainError("curvature_check: invalid sampling parameters");
    }
    conic_terms(a, c, conic, conic == Conic::Ellipse ? std::numbers::pi : 0.0);
    const Vec2 xi0{2.0 * c, 0.0};
    CurvatureResult res;
    res.kappa_min = kInf;
    res.alpha_proxy = kInf;
    double rmin = kInf, rmax = 0.0;
    for (int k = 0; k < samples; ++k)
    {
        const double th = theta_range.lo + (k + 0.5) * theta_range.length() / samples;
        if (a + (conic == Conic::Ellipse ? -c : c) * std::cos(th) <= 0.0)
        {
            continue; // off the branch
        }
        const Vec2 xi = conic_point(a, c, conic, th);
        const Vec2 other = conic == Conic::Ellipse ? xi0 - xi : xi - xi0;
        const double t12 = angle(xi, other);
        if (t12 < alpha)
        {
            continue;
        }
        const double ka = conic_curvature(a, c, conic, th);
        const double kn = conic_curvature_numeric(a, c, conic, th);
        res.max_rel_err = std::max(res.max_rel_err, std::abs(kn - ka) / ka);
        res.kappa_min = std::min(res.kappa_min, ka);
        res.kappa_max = std::max(res.kappa_max, ka);
        res.alpha_proxy = std::min(res.alpha_proxy, t12);
        rmin = std::min(rmin, norm(xi));
        rmax = std::max(rmax, norm(xi));
        ++res.samples;
    }
    if (res.samples == 0)
    {
        throw DomainError("curvature_check: no sample satisfies theta12 >= alpha");
    }
    res.N1_proxy = std::sqrt(rmin * rmax);
    res.pass = res.max_rel_err <= kCurvatureRelTol && alpha / res.N1_proxy <= res.kappa_min * kappa_tol
               && res.kappa_max <= kappa_tol / res.N1_proxy;
    return res;
}

GradientFlowResult gradient_flow_identity(Vec2 xi, Vec2 xi0, Sign s)
{
    if (!(xi0.x > 0.0) || xi0.y != 0.0)
    {
        throw DomainError("gradient_flow_identity: coordinates must have xi0 = (|xi0|, 0)");
    }
    const double A = norm(xi), B = norm(xi0 - xi);
    if (A < 1e-3 * xi0.x || B < 1e-3 * xi0.x)
    {
        throw DomainError("gradient_flow_identity: point within 1e-3 |xi0| of a focus");
    }
    const double sg = value(s);
    GradientFlowResult res;
    res.stated_form = xi.y * xi.y * (B + sg * A) / (B * B * B * A * A * A);
    res.analytic = 2.0 * xi0.x * xi0.x * res.stated_form;

    // Quad precision keeps the second differences far below the 1e-6 target.
    using ld = boost::multiprecision::cpp_bin_float_quad;
    const ld c0 = xi0.x, sgl = sg;
    auto f = [&](const ld& x, const ld& y) {
        using boost::multiprecision::sqrt;
        return sqrt(x * x + y * y) + sgl * sqrt((c0 - x) * (c0 - x) + y * y);
    };
    // Gradient and Hessian of f by central differences, Richardson-extrapolated;
    // then ∇(|∇f|²)·∇f = 2 ∇fᵀ H ∇f.
    auto stencil = [&](const ld& h) {
        const ld x = xi.x, y = xi.y;
        const ld f0 = f(x, y);
        const ld fxp = f(x + h, y), fxm = f(x - h, y), fyp = f(x, y + h), fym = f(x, y - h);
        const ld gx = (fxp - fxm) / (2 * h), gy = (fyp - fym) / (2 * h);
        const ld hxx = (fxp - 2 * f0 + fxm) / (h * h);
        const ld hyy = (fyp - 2 * f0 + fym) / (h * h);
        const ld hxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
        return std::array<ld, 5>{gx, gy, hxx, hyy, hxy};
    };
    const ld h = ld(kGradientFlowStep) * ld(std::min(A, B));
    const auto c1 = stencil(h);
    const auto c2 = stencil(h / 2);
    std::array<ld, 5> d{};
    for (int i = 0; i < 5; ++i)
    {
        d[i] = (4 * c2[i] - c1[i]) / 3;
    }
    const auto [gx, gy, hxx, hyy, hxy] = d;
    res.numeric = static_cast<double>(ld(2) * (gx * gx * hxx + 2 * gx * gy * hxy + gy * gy * hyy));
    const double floor = kGradientFlowFloor / xi0.x;
    res.rel_err = std::abs(res.numeric - res.analytic) / std::max(std::abs(res.analytic), floor);
    return res;
}

// -- sweeps ------------------------------------------------------------------

namespace {

bool is_dyadic(double v)
{
    if (!(v > 0.0) || !std::isfinite(v))
    {
        return false;
    }
    const double k = std::log2(v);
    return std::abs(k - std::round(k)) < 1e-9;
}

void assign_axis(const std::string& name, double v, DyadicParams& p, Extras& e)
{
    static const char* Nn[] = {"N0", "N1", "N2"};
    static const char* Ln[] = {"L0", "L1", "L2"};
    for (int j = 0; j < 3; ++j)
    {
        if (name == Nn[j])
        {
            p.N[j] = v;
            return;
        }
        if (name == Ln[j])
        {
            p.L[j] = v;
            return;
        }
    }
    if (name == "N")
    {
        p.N = {v, v, v};
    }
    else if (name == "L12")
    {
        p.L[1] = p.L[2] = v;
    }
    else
    {
        e[name] = v;
    }
}

double axis_value(const std::string& name, const RatioReport& r)
{
    static const char* Nn[] = {"N0", "N1", "N2"};
    static const char* Ln[] = {"L0", "L1", "L2"};
    for (int j = 0; j < 3; ++j)
    {
        if (name == Nn[j])
        {
            return r.params.N[j];
        }
        if (name == Ln[j])
        {
            return r.params.L[j];
        }
    }
    if (name == "N")
    {
        return r.params.N[1];
    }
    if (name == "L12")
    {
        return r.params.L[1];
    }
    return get(r.extras, name, std::numeric_limits<double>::quiet_NaN());
}

} // namespace

std::vector<std::pair<DyadicParams, Extras>> expand_sweep(const SweepSpec& spec)
{
    std::size_t total = spec.sign_patterns.empty() ? 1 : spec.sign_patterns.size();
    for (const auto& ax : spec.axes)
    {
        if (ax.values.empty())
        {
            throw DomainError("sweep axis '" + ax.name + "' is empty");
        }
        for (double v : ax.values)
        {
            if (!is_dyadic(v))
            {
                throw DomainError("sweep axis '" + ax.name + "' has a non-dyadic value " + format_real(v));
            }
        }
        total *= ax.values.size();
        if (total > kMaxSweepConfigs)
        {
            throw BudgetError("sweep exceeds " + std::to_string(kMaxSweepConfigs) + " configurations");
        }
    }
    std::vector<std::array<Sign, 3>> patterns = spec.sign_patterns;
    if (patterns.empty())
    {
        patterns.push_back(spec.base.signs);
    }
    std::vector<std::pair<DyadicParams, Extras>> out;
    out.reserve(total);
    for (const auto& sp : patterns)
    {
        std::vector<std::size_t> idx(spec.axes.size(), 0);
        while (true)
        {
            DyadicParams p = spec.base;
            p.signs = sp;
            Extras e = spec.extras;
            for (std::size_t a = 0; a < spec.axes.size(); ++a)
            {
                assign_axis(spec.axes[a].name, spec.axes[a].values[idx[a]], p, e);
            }
            out.emplace_back(p, e);
            std::size_t a = spec.axes.size();
            while (a > 0)
            {
                --a;
                if (++idx[a] < spec.axes[a].values.size())
                {
                    break;
                }
                idx[a] = 0;
                if (a == 0)
                {
                    a = std::string::npos;
                    break;
                }
            }
            if (spec.axes.empty() || a == std::string::npos)
            {
                break;
            }
        }
    }
    return out;
}

std::vector<SlopeFit> fit_slopes(const SweepSpec& spec, const std::vector<RatioReport>& reports)
{
    std::vector<SlopeFit> fits;
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
    {
        const std::string& name = spec.axes[a].name;
        // Group key: sign pattern and every other axis value.
        std::map<std::vector<double>, std::vector<std::pair<double, double>>> groups;
        for (const auto& r : reports)
        {
            if (!(r.empirical > 0.0))
            {
                continue;
            }
            std::vector<double> key;
            for (Sign s : r.params.signs)
            {
                key.push_back(value(s));
            }
            for (std::size_t b = 0; b < spec.axes.size(); ++b)
            {
                if (b != a)
                {
                    key.push_back(axis_value(spec.axes[b].name, r));
                }
            }
            groups[key].emplace_back(std::log(axis_value(name, r)), std::log(r.empirical));
        }
        SlopeFit fit;
        fit.parameter = name;
        fit.slope_min = kInf;
        fit.slope_max = -kInf;
        double sum = 0.0;
        for (const auto& [key, pts] : groups)
        {
            std::set<double> xs;
            for (const auto& pt : pts)
            {
                xs.insert(pt.first);
            }
            if (xs.size() < 2)
            {
                continue;
            }
            Eigen::MatrixXd X(static_cast<Eigen::Index>(pts.size()), 2);
            Eigen::VectorXd y(static_cast<Eigen::Index>(pts.size()));
            for (std::size_t i = 0; i < pts.size(); ++i)
            {
                X(static_cast<Eigen::Index>(i), 0) = 1.0;
                X(static_cast<Eigen::Index>(i), 1) = pts[i].first;
                y(static_cast<Eigen::Index>(i)) = pts[i].second;
            }
            const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
            sum += beta(1);
            fit.slope_min = std::min(fit.slope_min, beta(1));
            fit.slope_max = std::max(fit.slope_max, beta(1));
            ++fit.groups;
        }
        if (fit.groups > 0)
        {
            fit.slope = sum / fit.groups;
            fits.push_back(fit);
        }
    }
    return fits;
}

SweepResult sweep(const SweepSpec& spec, const EmpiricalOptions& opt)
{
    const auto configs = expand_sweep(spec);
    std::vector<std::optional<RatioReport>> slots(configs.size());
    std::vector<std::string> errors(configs.size());
    parallel_for(configs.size(), [&](std::size_t i) {
        try
        {
            slots[i] = empirical_constant(spec.id, configs[i].first, configs[i].second, spec.strategy, spec.dims,
                                          derive_seed(spec.seed, static_cast<std::uint64_t>(i)), opt);
        }
        catch (const std::exception& e)
        {
            errors[i] = e.what();
        }
    });
    SweepResult res;
    for (std::size_t i = 0; i < configs.size(); ++i)
    {
        if (!slots[i])
        {
            res.complete = false;
            res.error = "config " + std::to_string(i) + ": " + errors[i];
            break;
        }
        res.reports.push_back(*slots[i]);
    }
    for (const auto& r : res.reports)
    {
        res.max_ratio = std::max(res.max_ratio, r.ratio);
        if (is_extremizer(r.strategy))
        {
            res.min_sharp_ratio = std::min(res.min_sharp_ratio.value_or(kInf), r.ratio);
        }
    }
    if (res.complete)
    {
        res.fits = fit_slopes(spec, res.reports);
    }
    return res;
}

// -- serialization -----------------------------------------------------------

std::string format_real(double v)
{
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    if (std::isnan(v))
    {
        return "nan";
    }
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j)
{
    try
    {
        SweepSpec s;
        s.id = estimate_id_from_string(j.at("id").get<std::string>());
        if (j.contains("params"))
        {
            s.base = params_from_json(j.at("params"));
        }
        if (j.contains("extras"))
        {
            for (const auto& [k, v] : j.at("extras").items())
            {
                s.extras[k] = real_from_json(v);
            }
        }
        if (j.contains("axes"))
        {
            for (const auto& [k, v] : j.at("axes").items())
            {
                SweepAxis ax{k, {}};
                for (const auto& x : v)
                {
                    ax.values.push_back(real_from_json(x));
                }
                s.axes.push_back(std::move(ax));
            }
        }
        if (j.contains("sign_patterns"))
        {
            for (const auto& pat : j.at("sign_patterns"))
            {
                const auto v = pat.get<std::vector<int>>();
                if (v.size() != 3)
                {
                    throw ParseError("sign pattern needs three entries");
                }
                s.sign_patterns.push_back({sign_from_int(v[0]), sign_from_int(v[1]), sign_from_int(v[2])});
            }
        }
        if (j.contains("strategy"))
        {
            s.strategy = strategy_from_string(j.at("strategy").get<std::string>());
        }
        if (j.contains("dims"))
        {
            s.dims = j.at("dims").get<std::array<int, 3>>();
        }
        if (j.contains("seed"))
        {
            s.seed = j.at("seed").get<std::uint64_t>();
        }
        return s;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ParseError(std::string("sweep spec: ") + e.what());
    }
    catch (const DomainError& e)
    {
        throw ParseError(std::string("sweep spec: ") + e.what());
    }
}

nlohmann::json to_json(const SweepSpec& s)
{
    nlohmann::json axes = nlohmann::json::object();
    for (const auto& ax : s.axes)
    {
        axes[ax.name] = ax.values;
    }
    nlohmann::json pats = nlohmann::json::array();
    for (const auto& sp : s.sign_patterns)
    {
        pats.push_back({static_cast<int>(sp[0]), static_cast<int>(sp[1]), static_cast<int>(sp[2])});
    }
    nlohmann::json extras = nlohmann::json::object();
    for (const auto& [k, v] : s.extras)
    {
        extras[k] = v;
    }
    return {{"id", to_string(s.id)}, {"params", to_json(s.base)}, {"extras", extras}, {"axes", axes},
            {"sign_patterns", pats}, {"strategy", to_string(s.strategy)}, {"dims", s.dims}, {"seed", s.seed}};
}

nlohmann::json to_json(const SlopeFit& f)
{
    return {{"parameter", f.parameter}, {"slope", f.slope}, {"slope_min", f.slope_min},
            {"slope_max", f.slope_max}, {"groups", f.groups}};
}

nlohmann::json summary_json(const SweepResult& r)
{
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& f : r.fits)
    {
        fits.push_back(to_json(f));
    }
    nlohmann::json j{{"reports", r.reports.size()}, {"fitted_exponents", fits}, {"max_ratio", r.max_ratio},
                     {"complete", r.complete}};
    j["min_sharp_ratio"] = r.min_sharp_ratio ? nlohmann::json(*r.min_sharp_ratio) : nlohmann::json(nullptr);
    if (!r.complete)
    {
        j["error"] = r.error;
    }
    return j;
}

void write_reports_csv(std::ostream& out, const std::vector<RatioReport>& reports, bool timing)
{
    std::set<std::string> keys;
    for (const auto& r : reports)
    {
        for (const auto& kv : r.extras)
        {
            keys.insert(kv.first);
        }
    }
    out << "id,N0,N1,N2,L0,L1,L2,sign0,sign1,sign2";
    for (const auto& k : keys)
    {
        out << ',' << k;
    }
    out << ",predicted,empirical,ratio,strategy,dims,seed,runtime_ms\n";
    for (const auto& r : reports)
    {
        out << to_string(r.id);
        for (double v : r.params.N)
        {
            out << ',' << format_real(v);
        }
        for (double v : r.params.L)
        {
            out << ',' << format_real(v);
        }
        for (Sign s : r.params.signs)
        {
            out << ',' << symbol(s);
        }
        for (const auto& k : keys)
        {
            out << ',';
            if (const auto it = r.extras.find(k); it != r.extras.end())
            {
                out << format_real(it->second);
            }
        }
        out << ',' << format_real(r.predicted) << ',' << format_real(r.empirical) << ',' << format_real(r.ratio)
            << ',' << to_string(r.strategy) << ',' << r.dims[0] << 'x' << r.dims[1] << 'x' << r.dims[2] << ','
            << r.seed << ',' << format_real(timing ? r.runtime_ms : 0.0) << '\n';
    }
}

} // namespace conelab
