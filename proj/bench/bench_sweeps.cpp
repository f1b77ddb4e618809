// Serial reference vs OpenMP paths of the independent-run sweeps.
// Each benchmark takes Execution as its argument: 0 serial, 1 parallel.

#include "wpt/closed_loop.hpp"
#include "wpt/design.hpp"
#include "wpt/sweeps.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace wpt;

namespace {

ReceiverParams designed() {
    ReceiverParams p = prototype_params();
    const auto split = design::split_capacitance(design::resonant_capacitance(p.l, p.k, p.fs));
    p.c_ac = split.c_ac;
    p.c_f = split.c_f;
    return p;
}

Execution exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    }
    return xs;
}

void BM_SweepPhase(benchmark::State& state) {
    const ReceiverParams p = designed();
    const auto ds = linspace(0.0, 0.25, 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep::sweep_phase(p, ds, exec_of(state)));
    }
}

void BM_ZvsGrid(benchmark::State& state) {
    const ReceiverParams p = designed();
    const auto loads = linspace(2.0, 20.0, 16);
    const auto ds = linspace(0.01, 0.25, 16);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep::zvs_grid(p, loads, ds, exec_of(state)));
    }
}

void BM_FeasibleRegion(benchmark::State& state) {
    const design::DesignSpec spec;
    const auto ks = linspace(0.0, 0.99, 400);
    const auto ls = linspace(1e-7, 2e-4, 400);
    for (auto _ : state) {
        benchmark::DoNotOptimize(design::feasible_region(spec, ks, ls, exec_of(state)));
    }
}

void BM_FrequencyResponse(benchmark::State& state) {
    const ReceiverParams p = designed();
    const std::vector<double> fs{1, 3, 10, 30, 100, 300, 1000};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            sweep::frequency_response(p, control::LoopKind::kVoltage, PhaseShift(0.1), fs, {}, exec_of(state)));
    }
}

void BM_MagneticSearch(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(design::solve_magnetic_design(22e-6, 0.71, 1e6, 200, exec_of(state)));
    }
}

void BM_RegulationSweep(benchmark::State& state) {
    const ReceiverParams p = designed();
    control::PIGains g = control::design_pi(control::LoopKind::kVoltage, p, 200.0, PhaseShift(0.125), p.r_load);
    g = control::tustin_discretize(g, p.period());
    const std::vector<double> grid{0.2, 0.4, 0.6, 0.8, 1.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(loop::regulation_sweep(p, g, control::LoopKind::kVoltage, 12.0,
                                                        loop::SweepAxis::kLoadPower, grid, {}, exec_of(state)));
    }
}

} // namespace

BENCHMARK(BM_SweepPhase)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ZvsGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeasibleRegion)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FrequencyResponse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MagneticSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegulationSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
