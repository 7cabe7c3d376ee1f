#include <benchmark/benchmark.h>

#include "coulomb/classical_eikonal.hpp"
#include "coulomb/sliced_propagator.hpp"
#include "coulomb/so4_harmonics.hpp"
#include "coulomb/spectral_engine.hpp"

using namespace coulomb;

static void BM_WignerDMatrix(benchmark::State& state) {
    const auto u = su2_from_sphere(SpherePoint4::from_angles(0.7, 1.1, 2.3));
    const int tj = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(wigner_D_matrix(tj, u));
}
BENCHMARK(BM_WignerDMatrix)->Arg(1)->Arg(5)->Arg(15)->Arg(31);

static void BM_HypersphericalLevel(benchmark::State& state) {
    const auto p = SpherePoint4::from_angles(0.7, 1.1, 2.3);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hyperspherical_Y_level(n, p));
}
BENCHMARK(BM_HypersphericalLevel)->Arg(2)->Arg(6);

static void BM_FixedEnergyAmplitude(benchmark::State& state) {
    double theta = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fixed_energy_amplitude(theta, -0.21));
        theta = theta < 3.0 ? theta + 0.01 : 0.3;
    }
}
BENCHMARK(BM_FixedEnergyAmplitude);

static void BM_FindPoles(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(find_poles(PoleScanConfig{}));
}
BENCHMARK(BM_FindPoles)->Unit(benchmark::kMillisecond);

static void BM_KernelToModes(benchmark::State& state) {
    SliceConfig cfg;
    cfg.grid_points = static_cast<int>(state.range(0));
    const auto ctx = EnergyContext::from_momentum_scale(1.0);
    const auto samples = sample_kernel(ShortTimeKernel(cfg, ctx), cfg.grid_points);
    for (auto _ : state) benchmark::DoNotOptimize(kernel_to_modes(samples, cfg));
}
BENCHMARK(BM_KernelToModes)->Arg(128)->Arg(256)->Arg(1024);

static void BM_MinimizeEikonal(benchmark::State& state) {
    const EnergyContext ctx(-0.5);
    MinimizerOptions opt;
    opt.n_points = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimize_eikonal(Momentum3{{1, 0, 0}}, Momentum3{{0, 1.5, 0.3}}, ctx, opt));
    }
}
BENCHMARK(BM_MinimizeEikonal)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
