// SPDX-License-Identifier: Apache-2.0
// Serial vs OpenMP timings for the Monte Carlo reduction and trial preparation.
#include <benchmark/benchmark.h>

#include "isac/harness.hpp"
#include "isac/propagation.hpp"
#include "isac/scenario.hpp"
#include "isac/stats.hpp"

namespace {

using namespace isac;

Execution exec_of(const benchmark::State& state)
{
    return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_CollectStatistics(benchmark::State& state)
{
    const SystemConfig cfg;
    const Scenario sc = build_scenario(cfg);
    const MonteCarloModel model(sc, build_network_stats(sc, drop_ues(sc, 0), 0), 0);
    const Execution exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(collect_statistics(model, cfg.mc_inner, exec));
    }
    state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}
BENCHMARK(BM_CollectStatistics)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PrepareTrials(benchmark::State& state)
{
    const SystemConfig cfg;
    const Scenario sc = build_scenario(cfg);
    const Execution exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prepare_trials(sc, 8, exec));
    }
    state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}
BENCHMARK(BM_PrepareTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
