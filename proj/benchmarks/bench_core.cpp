#include "ecdc/ecdc.hpp"

#include <benchmark/benchmark.h>

using namespace ecdc;

namespace {

ModelParams sized(int m1, int m2, int m3) {
    ModelParams p;
    p.lambda = 1.5;
    p.mu1 = 1.2;
    p.mu2 = 1.0;
    p.m1 = m1;
    p.m2 = m2;
    p.m3 = m3;
    p.P1W = 1.0;
    p.P2W = 1.5;
    p.P2S = 0.3;
    p.C1 = 1.0;
    p.C2_1 = 0.1;
    p.C2_2 = 0.2;
    p.C2_3 = 0.3;
    p.C3_1 = 0.2;
    p.C3_2 = 0.1;
    p.C4 = 0.1;
    p.C5 = 0.4;
    p.R = 3.0;
    return p;
}

void BM_BuildGenerator(benchmark::State& state) {
    const ModelParams p = sized(3, 3, static_cast<int>(state.range(0)));
    const Policy d = case1_policy(p);
    for (auto _ : state) benchmark::DoNotOptimize(build_generator(p, d));
    state.counters["states"] = static_cast<double>(StateSpace(p).size());
}
BENCHMARK(BM_BuildGenerator)->Arg(5)->Arg(20)->Arg(60);

void BM_StationaryDirect(benchmark::State& state) {
    const ModelParams p = sized(3, 3, static_cast<int>(state.range(0)));
    const GeneratorMatrix G = build_generator(p, case1_policy(p));
    for (auto _ : state) benchmark::DoNotOptimize(stationary_direct(G));
}
BENCHMARK(BM_StationaryDirect)->Arg(5)->Arg(20)->Arg(60);

void BM_StationaryRG(benchmark::State& state) {
    const ModelParams p = sized(3, 3, static_cast<int>(state.range(0)));
    const GeneratorMatrix G = build_generator(p, case1_policy(p));
    for (auto _ : state) benchmark::DoNotOptimize(stationary_rg(G));
}
BENCHMARK(BM_StationaryRG)->Arg(5)->Arg(20)->Arg(60);

void BM_EvaluatePolicy(benchmark::State& state) {
    const ModelParams p = sized(3, 3, 5);
    const Policy d = case1_policy(p);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(p, d));
}
BENCHMARK(BM_EvaluatePolicy);

void BM_EnumerateOptimal(benchmark::State& state) {
    const ModelParams p = sized(1, 2, 2);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_optimal(p));
}
BENCHMARK(BM_EnumerateOptimal)->Unit(benchmark::kMillisecond);

void BM_CriticalPrices(benchmark::State& state) {
    const ModelParams p = sized(1, 2, 2);
    for (auto _ : state) benchmark::DoNotOptimize(critical_prices(p));
}
BENCHMARK(BM_CriticalPrices)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
    const ModelParams p = sized(2, 2, 3);
    const Policy d = case1_policy(p);
    for (auto _ : state) benchmark::DoNotOptimize(simulate(p, d, 1e4, 1, 1));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
