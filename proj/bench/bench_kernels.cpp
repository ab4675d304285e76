// OpenMP kernels against their serial reference versions.
#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "heattrack/flatness.hpp"
#include "heattrack/pde.hpp"
#include "heattrack/targets.hpp"
#include "heattrack/transmutation.hpp"

using namespace heattrack;

namespace {

const FlatTargetBuild& mollified_ramp() {
    static const FlatTargetBuild b = make_flat_target(std::make_shared<RampTarget>(1.0, 1.0), 0.5, 0.1);
    return b;
}

struct WaveCase {
    TransmutationPlan plan;
    WaveField z;
};

WaveCase make_wave(int cells, int steps) {
    const SpaceGrid xg(1.0, cells);
    TransmutationPlan plan = make_plan(TimeGrid(1.0, steps), xg);
    std::vector<double> g(plan.sgrid.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double u = (std::abs(plan.sgrid.node(static_cast<int>(k))) - 2.0) / 2.0;
        g[k] = u <= 0.0 || u >= 1.0 ? 0.0 : std::exp(4.0 - 1.0 / (u * (1.0 - u)));
    }
    const std::vector<double> rest(xg.size(), 0.0);
    WaveField z = solve_wave({xg, plan.sgrid, WaveSignal(plan.sgrid, std::move(g)), rest, rest});
    return {std::move(plan), std::move(z)};
}

void BM_FlatControl(benchmark::State& state) {
    const TimeGrid tg(1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(flat_control(mollified_ramp().target, 1.0, tg));
}

void BM_FlatControlReference(benchmark::State& state) {
    const TimeGrid tg(1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::flat_control(mollified_ramp().target, 1.0, tg));
}

void BM_SeriesState(benchmark::State& state) {
    const TimeGrid tg(1.0, static_cast<int>(state.range(0)));
    const SpaceGrid xg(1.0, 50);
    for (auto _ : state) benchmark::DoNotOptimize(series_state(mollified_ramp().target, xg, tg));
}

void BM_SeriesStateReference(benchmark::State& state) {
    const TimeGrid tg(1.0, static_cast<int>(state.range(0)));
    const SpaceGrid xg(1.0, 50);
    for (auto _ : state) benchmark::DoNotOptimize(reference::series_state(mollified_ramp().target, xg, tg));
}

void BM_Transmute(benchmark::State& state) {
    const WaveCase c = make_wave(50, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(transmute_field(c.z, c.plan));
}

void BM_TransmuteReference(benchmark::State& state) {
    const WaveCase c = make_wave(50, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::transmute_field(c.z, c.plan));
}

}  // namespace

BENCHMARK(BM_FlatControl)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FlatControlReference)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SeriesState)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SeriesStateReference)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Transmute)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TransmuteReference)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
