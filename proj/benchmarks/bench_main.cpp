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

#include <benchmark/benchmark.h>

#include "conelab/geometry.hpp"
#include "conelab/spectral.hpp"
#include "conelab/volume.hpp"

namespace {

using namespace conelab;

void BM_McVolumeConeAnnulus(benchmark::State& state)
{
    const Region R = Region::cone_annulus(Sign::Plus, 1.0, 0.05);
    const Box box = bounding_box(R);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(mc_volume(R, box, state.range(0), 42).value);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McVolumeConeAnnulus)->Arg(1 << 14)->Arg(1 << 18);

void BM_ShellPairVolume(benchmark::State& state)
{
    const ConeShell A = ConeShell::annulus(Sign::Plus, 1.0, 0.01);
    const ConeShell B = ConeShell::annulus(Sign::Plus, 2.0, 0.01);
    const FreqPoint X0{3.0, {3.0, 0.0}};
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(shell_pair_volume(A, B, X0, -1));
    }
}
BENCHMARK(BM_ShellPairVolume);

GridFunction annulus_on(const Lattice& lat, double N, double L)
{
    return indicator_function(Region::cone_annulus(Sign::Plus, N, L), lat);
}

void BM_Convolve(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto method = static_cast<ConvolutionMethod>(state.range(1));
    const Lattice lat = make_lattice(bounding_box(Region::cone_annulus(Sign::Plus, 1.0, 0.25)), {n, n, n});
    const GridFunction f = annulus_on(lat, 1.0, 0.25);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(convolve(f, f, method).values.data());
    }
    state.counters["support"] = static_cast<double>(f.support_size());
}
BENCHMARK(BM_Convolve)
    ->Args({16, static_cast<int>(ConvolutionMethod::Direct)})
    ->Args({16, static_cast<int>(ConvolutionMethod::Fft)})
    ->Args({32, static_cast<int>(ConvolutionMethod::Fft)})
    ->Args({64, static_cast<int>(ConvolutionMethod::Fft)})
    ->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
