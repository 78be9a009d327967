// Microbenchmarks for the hot paths: Liouvillian assembly, the dense
// steady-state solve that dominates every scan, the three-solve sideband
// balance, the probe-detuning optimizer, and 40-ion normal modes.

#include <benchmark/benchmark.h>

#include <eitcool/constants.hpp>
#include <eitcool/cooling_limits.hpp>
#include <eitcool/ion_chain.hpp>
#include <eitcool/spectroscopy.hpp>
#include <eitcool/steady_state.hpp>

using namespace eitcool;

namespace {

TrapConfig forty_ion_trap() {
    TrapConfig c;
    c.n_ions = 40;
    c.omega_ax = constants::two_pi * 0.27e6;
    c.omega_alpha = constants::two_pi * 4.45e6;
    c.omega_beta = constants::two_pi * 4.30e6;
    return c;
}

void BM_BuildLiouvillian(benchmark::State& state) {
    const TripodParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_liouvillian(p));
    }
}
BENCHMARK(BM_BuildLiouvillian);

void BM_SteadyStateSolve(benchmark::State& state) {
    const Liouvillian l = build_liouvillian(TripodParams{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_steady_state(l));
    }
}
BENCHMARK(BM_SteadyStateSolve);

void BM_PhononLimit(benchmark::State& state) {
    const TripodParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phonon_limit(p, 0.22, 0.044));
    }
}
BENCHMARK(BM_PhononLimit);

void BM_OptimizeProbeDetuning(benchmark::State& state) {
    const TripodParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            optimize_probe_detuning(p, 0.22, 4.3, 4.9));
    }
}
BENCHMARK(BM_OptimizeProbeDetuning)->Unit(benchmark::kMillisecond);

void BM_ChainModes40(benchmark::State& state) {
    const TrapConfig c = forty_ion_trap();
    for (auto _ : state) {
        benchmark::DoNotOptimize(transverse_modes(c));
    }
}
BENCHMARK(BM_ChainModes40)->Unit(benchmark::kMillisecond);

void BM_CarrierFlopExact(benchmark::State& state) {
    const std::vector<double> etas(80, 0.02);
    const std::vector<double> nbars(80, 1.5);
    std::vector<double> t(200);
    for (int i = 0; i < 200; ++i) t[i] = 30e-6 * (i + 1) / 200.0;
    const double om = constants::two_pi * 1e5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(carrier_flop(om, etas, nbars, t, false));
    }
}
BENCHMARK(BM_CarrierFlopExact);

} // namespace

BENCHMARK_MAIN();
