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

#include "conelab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include "conelab/decomposition.hpp"
#include "conelab/error.hpp"
#include "conelab/parallel.hpp"

namespace conelab {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Support-pair count up to which Automatic convolution sums directly.
constexpr double kDirectPairLimit = 2e7;

struct SupportList
{
    std::vector<std::size_t> linear;
    std::vector<std::array<int, 3>> multi;
};

SupportList support_of(const GridFunction& f)
{
    SupportList s;
    for (std::size_t i = 0; i < f.values.size(); ++i)
    {
        if (f.mask[i] && f.values[i] != cplx{})
        {
            s.linear.push_back(i);
            s.multi.push_back(f.lattice.unravel(i));
        }
    }
    return s;
}

Lattice sum_lattice(const Lattice& a, const Lattice& b)
{
    if (!a.same_spacing(b))
    {
        throw DomainError("convolve: lattice spacings differ");
    }
    Lattice out;
    out.h = a.h;
    for (int d = 0; d < 3; ++d)
    {
        out.lo[d] = a.lo[d] + b.lo[d] + 0.5 * a.h[d];
        out.dims[d] = a.dims[d] + b.dims[d] - 1;
    }
    return out;
}

int smooth_size(int n)
{
    for (int m = std::max(n, 1);; ++m)
    {
        int k = m;
        for (int p : {2, 3, 5, 7})
        {
            while (k % p == 0)
            {
                k /= p;
            }
        }
        if (k == 1)
        {
            return m;
        }
    }
}

std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwBuffer
{
    explicit FftwBuffer(std::size_t n) : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        if (data == nullptr)
        {
            throw std::bad_alloc();
        }
        std::memset(data, 0, sizeof(fftw_complex) * n);
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

void fft_inplace(fftw_complex* data, const std::array<int, 3>& n, int direction)
{
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_3d(n[0], n[1], n[2], data, data, direction, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

GridFunction convolve_direct(const GridFunction& f1, const GridFunction& f2, const Lattice& out_lat)
{
    GridFunction g = GridFunction::zeros(out_lat);
    const SupportList s1 = support_of(f1);
    const SupportList s2 = support_of(f2);
    const double cv = f1.lattice.cell_volume();
    for (std::size_t a = 0; a < s1.linear.size(); ++a)
    {
        const cplx v1 = f1.values[s1.linear[a]] * cv;
        const auto& m1 = s1.multi[a];
        for (std::size_t b = 0; b < s2.linear.size(); ++b)
        {
            const auto& m2 = s2.multi[b];
            const std::size_t o = out_lat.index(m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]);
            g.values[o] += v1 * f2.values[s2.linear[b]];
        }
    }
    for (std::size_t i = 0; i < g.values.size(); ++i)
    {
        g.mask[i] = g.values[i] != cplx{} ? 1 : 0;
    }
    return g;
}

GridFunction convolve_fft(const GridFunction& f1, const GridFunction& f2, const Lattice& out_lat)
{
    std::array<int, 3> P{};
    for (int d = 0; d < 3; ++d)
    {
        P[d] = smooth_size(out_lat.dims[d]);
    }
    const std::size_t total = static_cast<std::size_t>(P[0]) * P[1] * P[2];
    FftwBuffer A(total), B(total);
    auto load = [&](const GridFunction& f, fftw_complex* dst) {
        const auto& n = f.lattice.dims;
        for (int i = 0; i < n[0]; ++i)
        {
            for (int j = 0; j < n[1]; ++j)
            {
                for (int k = 0; k < n[2]; ++k)
                {
                    const cplx v = f.values[f.lattice.index(i, j, k)];
                    const std::size_t o = (static_cast<std::size_t>(i) * P[1] + j) * P[2] + k;
                    dst[o][0] = v.real();
                    dst[o][1] = v.imag();
                }
            }
        }
    };
    load(f1, A.data);
    load(f2, B.data);
    fft_inplace(A.data, P, FFTW_FORWARD);
    fft_inplace(B.data, P, FFTW_FORWARD);
    for (std::size_t i = 0; i < total; ++i)
    {
        const cplx a{A.data[i][0], A.data[i][1]};
        const cplx b{B.data[i][0], B.data[i][1]};
        const cplx c = a * b;
        A.data[i][0] = c.real();
        A.data[i][1] = c.imag();
    }
    fft_inplace(A.data, P, FFTW_BACKWARD);
    const double scale = f1.lattice.cell_volume() / static_cast<double>(total);
    GridFunction g = GridFunction::zeros(out_lat);
    const auto& n = out_lat.dims;
    for (int i = 0; i < n[0]; ++i)
    {
        for (int j = 0; j < n[1]; ++j)
        {
            for (int k = 0; k < n[2]; ++k)
            {
                const std::size_t o = (static_cast<std::size_t>(i) * P[1] + j) * P[2] + k;
                const std::size_t idx = out_lat.index(i, j, k);
                g.values[idx] = cplx{A.data[o][0], A.data[o][1]} * scale;
                g.mask[idx] = 1;
            }
        }
    }
    return g;
}

} // namespace

// -- lattices ----------------------------------------------------------------

Box Lattice::extents() const noexcept
{
    return {{lo[0], lo[0] + dims[0] * h[0]}, {lo[1], lo[1] + dims[1] * h[1]}, {lo[2], lo[2] + dims[2] * h[2]}};
}

std::array<int, 3> Lattice::unravel(std::size_t idx) const noexcept
{
    const auto n2 = static_cast<std::size_t>(dims[2]);
    const auto n1 = static_cast<std::size_t>(dims[1]);
    return {static_cast<int>(idx / (n1 * n2)), static_cast<int>((idx / n2) % n1), static_cast<int>(idx % n2)};
}

FreqPoint Lattice::center(std::size_t idx) const noexcept
{
    const auto m = unravel(idx);
    return center(m[0], m[1], m[2]);
}

bool Lattice::same_spacing(const Lattice& o) const noexcept
{
    for (int d = 0; d < 3; ++d)
    {
        if (std::abs(h[d] - o.h[d]) > 1e-12 * h[d])
        {
            return false;
        }
    }
    return true;
}

Lattice make_lattice(const Box& box, std::array<int, 3> dims)
{
    Lattice lat;
    for (int d = 0; d < 3; ++d)
    {
        if (dims[d] < 8 || dims[d] > 1024)
        {
            throw DomainError("make_lattice: dims must lie in [8, 1024]");
        }
        const Interval& I = box.axis(d);
        if (!(I.length() > 0.0) || !std::isfinite(I.length()))
        {
            throw DomainError("make_lattice: box must have positive finite extent on every axis");
        }
        lat.lo[d] = I.lo;
        lat.h[d] = I.length() / dims[d];
        lat.dims[d] = dims[d];
    }
    return lat;
}

Lattice lattice_with_spacing(const Box& box, std::array<double, 3> h)
{
    Lattice lat;
    lat.h = h;
    for (int d = 0; d < 3; ++d)
    {
        const Interval& I = box.axis(d);
        if (!(h[d] > 0.0) || !std::isfinite(I.length()) || I.empty())
        {
            throw DomainError("lattice_with_spacing: needs positive spacing and a bounded box");
        }
        const double k0 = std::floor(I.lo / h[d] + 1e-9);
        const double k1 = std::ceil(I.hi / h[d] - 1e-9);
        const double n = std::max(1.0, k1 - k0);
        if (n > 1024)
        {
            throw DomainError("lattice_with_spacing: more than 1024 cells on an axis");
        }
        lat.lo[d] = k0 * h[d];
        lat.dims[d] = static_cast<int>(n);
    }
    return lat;
}

// -- grid functions ----------------------------------------------------------

GridFunction GridFunction::zeros(const Lattice& lat)
{
    return {lat, std::vector<cplx>(lat.size()), std::vector<std::uint8_t>(lat.size(), 0)};
}

std::size_t GridFunction::support_size() const noexcept
{
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

void GridFunction::check_invariants() const
{
    if (values.size() != lattice.size() || mask.size() != lattice.size())
    {
        throw DomainError("grid function size mismatch");
    }
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
        {
            throw DomainError("grid function has a non-finite value");
        }
        if (!mask[i] && values[i] != cplx{})
        {
            throw DomainError("grid function is nonzero off its support mask");
        }
    }
}

GridFunction indicator_function(const Region& R, const Lattice& lat)
{
    GridFunction f = GridFunction::zeros(lat);
    parallel_for(static_cast<std::size_t>(lat.dims[0]), [&](std::size_t i0) {
        for (int i1 = 0; i1 < lat.dims[1]; ++i1)
        {
            for (int i2 = 0; i2 < lat.dims[2]; ++i2)
            {
                const int a = static_cast<int>(i0);
                if (contains(R, lat.center(a, i1, i2)))
                {
                    const std::size_t idx = lat.index(a, i1, i2);
                    f.values[idx] = 1.0;
                    f.mask[idx] = 1;
                }
            }
        }
    });
    return f;
}

GridFunction restrict_to(const GridFunction& f, const Region& R)
{
    GridFunction g = f;
    for (std::size_t i = 0; i < g.values.size(); ++i)
    {
        if (g.mask[i] && !contains(R, g.lattice.center(i)))
        {
            g.mask[i] = 0;
            g.values[i] = cplx{};
        }
    }
    return g;
}

double l2_norm(const GridFunction& f)
{
    double s = 0.0;
    for (const auto& v : f.values)
    {
        s += std::norm(v);
    }
    return std::sqrt(s * f.lattice.cell_volume());
}

GridFunction shift(const GridFunction& f, std::array<int, 3> cells)
{
    GridFunction g = f;
    for (int d = 0; d < 3; ++d)
    {
        g.lattice.lo[d] += cells[d] * f.lattice.h[d];
    }
    return g;
}

GridFunction convolve(const GridFunction& f1, const GridFunction& f2, ConvolutionMethod method)
{
    const Lattice out = sum_lattice(f1.lattice, f2.lattice);
    if (method == ConvolutionMethod::Automatic)
    {
        const double pairs = static_cast<double>(f1.support_size()) * static_cast<double>(f2.support_size());
        method = pairs <= kDirectPairLimit ? ConvolutionMethod::Direct : ConvolutionMethod::Fft;
    }
    return method == ConvolutionMethod::Direct ? convolve_direct(f1, f2, out) : convolve_fft(f1, f2, out);
}

GridFunction reflect_conj(const GridFunction& f)
{
    Lattice lat = f.lattice;
    for (int d = 0; d < 3; ++d)
    {
        lat.lo[d] = -(f.lattice.lo[d] + f.lattice.dims[d] * f.lattice.h[d]);
    }
    GridFunction g = GridFunction::zeros(lat);
    const auto& n = lat.dims;
    for (int i = 0; i < n[0]; ++i)
    {
        for (int j = 0; j < n[1]; ++j)
        {
            for (int k = 0; k < n[2]; ++k)
            {
                const std::size_t src = f.lattice.index(n[0] - 1 - i, n[1] - 1 - j, n[2] - 1 - k);
                const std::size_t dst = lat.index(i, j, k);
                g.values[dst] = std::conj(f.values[src]);
                g.mask[dst] = f.mask[src];
            }
        }
    }
    return g;
}

GridFunction resample_aligned(const GridFunction& g, const Lattice& target)
{
    if (!g.lattice.same_spacing(target))
    {
        throw DomainError("resample_aligned: spacing mismatch");
    }
    std::array<long long, 3> off{};
    for (int d = 0; d < 3; ++d)
    {
        const double q = (target.lo[d] - g.lattice.lo[d]) / target.h[d];
        off[d] = std::llround(q);
        if (std::abs(q - static_cast<double>(off[d])) > 1e-6)
        {
            throw DomainError("resample_aligned: lattices are not aligned");
        }
    }
    GridFunction out = GridFunction::zeros(target);
    const auto& n = target.dims;
    const auto& m = g.lattice.dims;
    for (int i = 0; i < n[0]; ++i)
    {
        const long long a = i + off[0];
        if (a < 0 || a >= m[0])
        {
            continue;
        }
        for (int j = 0; j < n[1]; ++j)
        {
            const long long b = j + off[1];
            if (b < 0 || b >= m[1])
            {
                continue;
            }
            for (int k = 0; k < n[2]; ++k)
            {
                const long long c = k + off[2];
                if (c < 0 || c >= m[2])
                {
                    continue;
                }
                const std::size_t src =
                    g.lattice.index(static_cast<int>(a), static_cast<int>(b), static_cast<int>(c));
                const std::size_t dst = target.index(i, j, k);
                out.values[dst] = g.values[src];
                out.mask[dst] = g.mask[src];
            }
        }
    }
    return out;
}

double restricted_energy(const GridFunction& f, const Region& R)
{
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
    {
        if (f.values[i] != cplx{} && contains(R, f.lattice.center(i)))
        {
            s += std::norm(f.values[i]);
        }
    }
    return s * f.lattice.cell_volume();
}

double restricted_product_norm(const GridFunction& f1, const GridFunction& f2, const Region& A0)
{
    return std::sqrt(restricted_energy(convolve(f1, f2), A0));
}

double max_slab_energy(const GridFunction& f, Vec2 omega, double length)
{
    if (!(length >= 0.0))
    {
        throw DomainError("max_slab_energy: length must be nonnegative");
    }
    std::vector<std::pair<double, double>> pts;
    const double cv = f.lattice.cell_volume();
    for (std::size_t i = 0; i < f.values.size(); ++i)
    {
        if (f.values[i] != cplx{})
        {
            pts.emplace_back(dot(f.lattice.center(i).xi, omega), std::norm(f.values[i]) * cv);
        }
    }
    std::sort(pts.begin(), pts.end());
    double best = 0.0, window = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        while (j < pts.size() && pts[j].first <= pts[i].first + length)
        {
            window += pts[j].second;
            ++j;
        }
        best = std::max(best, window);
        window -= pts[i].second;
    }
    return best;
}

// -- null forms --------------------------------------------------------------

namespace {

struct DirectedSupport
{
    SupportList cells;
    std::vector<Vec2> unit; ///< s xi / |xi|, zero when xi = 0
    std::vector<double> phi;
};

DirectedSupport directed_support(const GridFunction& f, Sign s)
{
    if (f.support_size() > kNullFormSupportLimit)
    {
        throw DomainError("null form support exceeds " + std::to_string(kNullFormSupportLimit)
                          + " cells; use nullform_sectored on a coarser lattice");
    }
    DirectedSupport d{support_of(f), {}, {}};
    for (std::size_t idx : d.cells.linear)
    {
        const Vec2 xi = value(s) * f.lattice.center(idx).xi;
        const double r = norm(xi);
        d.unit.push_back(r > 0.0 ? xi * (1.0 / r) : Vec2{});
        d.phi.push_back(std::atan2(xi.y, xi.x));
    }
    return d;
}

GridFunction finish(GridFunction g)
{
    for (std::size_t i = 0; i < g.values.size(); ++i)
    {
        g.mask[i] = g.values[i] != cplx{} ? 1 : 0;
    }
    return g;
}

} // namespace

GridFunction nullform_grid(const GridFunction& f1, const GridFunction& f2, Sign s1, Sign s2, NullFormPower power)
{
    const Lattice out = sum_lattice(f1.lattice, f2.lattice);
    const DirectedSupport d1 = directed_support(f1, s1);
    const DirectedSupport d2 = directed_support(f2, s2);
    // index() is linear in the multi-index, so a pair lands at o1 + o2.
    auto offset = [&](const std::array<int, 3>& m) { return out.index(m[0], m[1], m[2]); };
    std::vector<std::size_t> o2;
    std::vector<double> phi2;
    std::vector<cplx> v2;
    for (std::size_t b = 0; b < d2.unit.size(); ++b)
    {
        if (d2.unit[b] != Vec2{})
        {
            o2.push_back(offset(d2.cells.multi[b]));
            phi2.push_back(d2.phi[b]);
            v2.push_back(f2.values[d2.cells.linear[b]]);
        }
    }
    GridFunction g = GridFunction::zeros(out);
    const double cv = f1.lattice.cell_volume();
    const bool small = power == NullFormPower::IndicatorSmall;
    for (std::size_t a = 0; a < d1.unit.size(); ++a)
    {
        if (d1.unit[a] == Vec2{})
        {
            continue;
        }
        const cplx v1 = f1.values[d1.cells.linear[a]] * cv;
        const std::size_t o1 = offset(d1.cells.multi[a]);
        const double p1 = d1.phi[a];
        for (std::size_t b = 0; b < o2.size(); ++b)
        {
            double w = std::abs(p1 - phi2[b]);
            if (w > kPi)
            {
                w = 2.0 * kPi - w;
            }
            if (small && w > kSmallAngleCutoff)
            {
                continue;
            }
            g.values[o1 + o2[b]] += v1 * v2[b] * w;
        }
    }
    return finish(std::move(g));
}

double nullform_direct(const GridFunction& f1, const GridFunction& f2, Sign s1, Sign s2, const Region& A0,
                       NullFormPower power)
{
    return std::sqrt(restricted_energy(nullform_grid(f1, f2, s1, s2, power), A0));
}

double angular_resolution(const GridFunction& f1, const GridFunction& f2)
{
    double res = 0.0;
    for (const GridFunction* f : {&f1, &f2})
    {
        const double h = std::max(f->lattice.h[1], f->lattice.h[2]);
        double rmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < f->values.size(); ++i)
        {
            if (f->values[i] != cplx{})
            {
                rmin = std::min(rmin, norm(f->lattice.center(i).xi));
            }
        }
        if (std::isfinite(rmin) && rmin > 0.0)
        {
            res = std::max(res, h / rmin);
        }
    }
    return res;
}

GridFunction nullform_sectored_grid(const GridFunction& f1, const GridFunction& f2, Sign s1, Sign s2,
                                    double gamma_min)
{
    const std::vector<double> scales = dyadic_angles(gamma_min);
    if (gamma_min < angular_resolution(f1, f2))
    {
        throw ResolutionError("nullform_sectored: gamma_min is below the angular resolution of the lattice");
    }
    const Lattice out = sum_lattice(f1.lattice, f2.lattice);
    const DirectedSupport d1 = directed_support(f1, s1);
    const DirectedSupport d2 = directed_support(f2, s2);
    const std::size_t K = scales.size();

    // Per scale: direction count, per-cell nearest direction, and the weight
    // as a function of index separation.
    std::vector<long long> count(K);
    std::vector<std::vector<int>> a1(K), a2(K);
    std::vector<std::vector<double>> weight(K);
    auto bands_containing = [&](double t) {
        int m = 0;
        for (double g : scales)
        {
            m += (3.0 * g <= t && t <= 12.0 * g) ? 1 : 0;
        }
        return m;
    };
    for (std::size_t k = 0; k < K; ++k)
    {
        const DirectionSet set = omega_set(scales[k]);
        const auto n = static_cast<long long>(set.size());
        count[k] = n;
        const double sp = set.spacing();
        auto nearest = [&](double phi) {
            long long i = std::llround(phi / sp);
            return static_cast<int>(((i % n) + n) % n);
        };
        for (double p : d1.phi)
        {
            a1[k].push_back(nearest(p));
        }
        for (double p : d2.phi)
        {
            a2[k].push_back(nearest(p));
        }
        weight[k].assign(static_cast<std::size_t>(n / 2 + 1), 0.0);
        for (long long m = 0; m <= n / 2; ++m)
        {
            const double t = static_cast<double>(m) * sp;
            const double g = scales[k];
            if (3.0 * g <= t && t <= 12.0 * g)
            {
                weight[k][static_cast<std::size_t>(m)] = t / bands_containing(t);
            }
            else if (k + 1 == K && t < 3.0 * g)
            {
                weight[k][static_cast<std::size_t>(m)] = g;
            }
        }
    }

    GridFunction g = GridFunction::zeros(out);
    const double cv = f1.lattice.cell_volume();
    for (std::size_t a = 0; a < d1.unit.size(); ++a)
    {
        if (d1.unit[a] == Vec2{})
        {
            continue;
        }
        const cplx v1 = f1.values[d1.cells.linear[a]] * cv;
        const auto& m1 = d1.cells.multi[a];
        for (std::size_t b = 0; b < d2.unit.size(); ++b)
        {
            if (d2.unit[b] == Vec2{})
            {
                continue;
            }
            double w = 0.0;
            for (std::size_t k = 0; k < K; ++k)
            {
                long long m = std::abs(static_cast<long long>(a1[k][a]) - a2[k][b]);
                m = std::min(m, count[k] - m);
                w += weight[k][static_cast<std::size_t>(m)];
            }
            if (w == 0.0)
            {
                continue;
            }
            const auto& m2 = d2.cells.multi[b];
            g.values[out.index(m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])] +=
                v1 * f2.values[d2.cells.linear[b]] * w;
        }
    }
    return finish(std::move(g));
}

double nullform_sectored(const GridFunction& f1, const GridFunction& f2, Sign s1, Sign s2, const Region& A0,
                         double gamma_min)
{
    return std::sqrt(restricted_energy(nullform_sectored_grid(f1, f2, s1, s2, gamma_min), A0));
}

double anisotropic_norm(const GridFunction& f, double N, double r)
{
    if (!(N > 0.0) || !(r > 0.0) || r > N)
    {
        throw DomainError("anisotropic_norm: requires 0 < r <= N");
    }
    struct Cell
    {
        Vec2 xi;
        double e;
    };
    std::vector<Cell> cells;
    const double cv = f.lattice.cell_volume();
    for (std::size_t i = 0; i < f.values.size(); ++i)
    {
        if (f.values[i] == cplx{})
        {
            continue;
        }
        const Vec2 xi = f.lattice.center(i).xi;
        const double rho = norm(xi);
        if (N <= rho && rho < 2.0 * N)
        {
            cells.push_back({xi, std::norm(f.values[i]) * cv});
        }
    }
    const DirectionSet set = omega_set(r / (4.0 * N));
    std::vector<double> energy(set.size(), 0.0);
    parallel_for(set.size(), [&](std::size_t k) {
        const Vec2 w = perp(set.directions[k]);
        double s = 0.0;
        for (const auto& c : cells)
        {
            s += std::abs(dot(c.xi, w)) <= 0.5 * r ? c.e : 0.0;
        }
        energy[k] = s;
    });
    const double best = energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
    return std::sqrt(N / r) * std::sqrt(best);
}

// -- packets -----------------------------------------------------------------

std::string to_string(PacketKind k)
{
    switch (k)
    {
    case PacketKind::Indicator: return "indicator";
    case PacketKind::KnappCap: return "knapp_cap";
    case PacketKind::NullRay: return "null_ray";
    }
    return "unknown";
}

Region packet_region(const PacketSpec& spec)
{
    switch (spec.kind)
    {
    case PacketKind::Indicator: return Region::cone_annulus(spec.sign, spec.N, spec.L);
    case PacketKind::KnappCap:
    {
        const double g = spec.gamma.value_or(std::sqrt(spec.L / spec.N));
        return Region::cone_sector(spec.sign, spec.N, spec.L, std::min(g, std::numbers::pi), spec.omega);
    }
    case PacketKind::NullRay:
    {
        const double r = spec.r.value_or(spec.L);
        return Region::cone_sector(spec.sign, spec.N, spec.L, std::min(std::numbers::pi, r / spec.N), spec.omega);
    }
    }
    throw DomainError("unknown packet kind");
}

void require_resolved(double L, const Lattice& lat)
{
    if (!(L >= kMinCellsPerThickness * lat.h[0] * (1.0 - 1e-12)))
    {
        throw ResolutionError("thickness L = " + std::to_string(L) + " spans fewer than "
                              + std::to_string(kMinCellsPerThickness) + " tau-cells");
    }
}

GridFunction knapp_packet(const PacketSpec& spec, const Lattice& lat)
{
    const Region R = packet_region(spec);
    require_resolved(spec.L, lat);
    const Box need = bounding_box(R);
    const Box have = lat.extents();
    for (int d = 0; d < 3; ++d)
    {
        const double tol = 1e-12 * std::max(1.0, std::abs(have.axis(d).hi) + std::abs(have.axis(d).lo));
        if (need.axis(d).lo < have.axis(d).lo - tol || need.axis(d).hi > have.axis(d).hi + tol)
        {
            throw DomainError("knapp_packet: packet support is clipped by the lattice box");
        }
    }
    return indicator_function(R, lat);
}

// -- persistence -------------------------------------------------------------

nlohmann::json to_json(const Lattice& lat)
{
    return {{"lo", lat.lo}, {"h", lat.h}, {"dims", lat.dims}};
}

Lattice lattice_from_json(const nlohmann::json& j)
{
    try
    {
        Lattice lat;
        lat.lo = j.at("lo").get<std::array<double, 3>>();
        lat.h = j.at("h").get<std::array<double, 3>>();
        lat.dims = j.at("dims").get<std::array<int, 3>>();
        for (int d = 0; d < 3; ++d)
        {
            if (!(lat.h[d] > 0.0) || lat.dims[d] < 1)
            {
                throw DomainError("lattice: spacing and dims must be positive");
            }
        }
        return lat;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ParseError(std::string("lattice: ") + e.what());
    }
}

void export_grid_function(const GridFunction& f, const std::string& prefix, const nlohmann::json& provenance)
{
    std::ofstream bin(prefix + ".bin", std::ios::binary);
    if (!bin)
    {
        throw std::runtime_error("cannot write " + prefix + ".bin");
    }
    std::vector<float> buf;
    buf.reserve(2 * f.values.size());
    for (const auto& v : f.values)
    {
        buf.push_back(static_cast<float>(v.real()));
        buf.push_back(static_cast<float>(v.imag()));
    }
    bin.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    nlohmann::json side{{"format", "complex64"}, {"order", "tau-major, xi2 fastest"},
                        {"lattice", to_json(f.lattice)}, {"provenance", provenance}};
    std::ofstream js(prefix + ".json");
    js << side.dump(2) << '\n';
}

GridFunction import_grid_function(const std::string& prefix)
{
    std::ifstream js(prefix + ".json");
    if (!js)
    {
        throw ParseError("cannot read " + prefix + ".json");
    }
    nlohmann::json side;
    try
    {
        js >> side;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ParseError(std::string("grid sidecar: ") + e.what());
    }
    const Lattice lat = lattice_from_json(side.at("lattice"));
    std::ifstream bin(prefix + ".bin", std::ios::binary);
    std::vector<float> buf(2 * lat.size());
    bin.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!bin || bin.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
    {
        throw ParseError("grid payload " + prefix + ".bin is truncated");
    }
    GridFunction f = GridFunction::zeros(lat);
    for (std::size_t i = 0; i < lat.size(); ++i)
    {
        f.values[i] = {buf[2 * i], buf[2 * i + 1]};
        f.mask[i] = f.values[i] != cplx{} ? 1 : 0;
    }
    return f;
}

} // namespace conelab
