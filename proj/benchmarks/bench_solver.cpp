#include <benchmark/benchmark.h>

#include "stacktherm/solver.hpp"

using namespace stacktherm;

namespace {

void bm_assemble(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto gm = discretize(reference_stack(), {n, n});
    for (auto _ : state) benchmark::DoNotOptimize(assemble_conductances(gm));
}
BENCHMARK(bm_assemble)->Arg(16)->Arg(64)->Arg(128);

void bm_direct(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto gm = discretize(reference_stack(), {n, n});
    const auto G = assemble_conductances(gm);
    const auto q = power_vector(gm, scenario_power_map(ScenarioId::S3));
    for (auto _ : state) benchmark::DoNotOptimize(solve_direct(G, q, gm.ambient, gm));
}
BENCHMARK(bm_direct)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void bm_cg(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto gm = discretize(reference_stack(), {n, n});
    const auto G = assemble_conductances(gm);
    const auto q = power_vector(gm, scenario_power_map(ScenarioId::S3));
    SolveStats stats;
    for (auto _ : state) benchmark::DoNotOptimize(solve_cg(G, q, gm.ambient, gm, {}, &stats));
    state.counters["iterations"] = static_cast<double>(stats.iterations);
}
BENCHMARK(bm_cg)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void bm_steady_state(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto stack = reference_stack();
    const auto pm = scenario_power_map(ScenarioId::S3);
    for (auto _ : state) benchmark::DoNotOptimize(steady_state(stack, pm, {n, n}));
}
BENCHMARK(bm_steady_state)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
