#include <benchmark/benchmark.h>

#include "anchorstream/anchorstream.hpp"

using namespace anchorstream;

namespace {
const CellCounts5 kTable(169, 12, 52, 19, 777, 1029);
}

static void BM_Estimate5Cell(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_5cell(kTable).n_hat);
    }
}
BENCHMARK(BM_Estimate5Cell);

static void BM_VarianceFpc1(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(var5_fpc1(kTable).var_n);
    }
}
BENCHMARK(BM_VarianceFpc1);

static void BM_VarianceUnadjusted(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(var5_unadjusted(kTable).var_n);
    }
}
BENCHMARK(BM_VarianceUnadjusted);

static void BM_DirichletDraw(benchmark::State& state) {
    RngStream stream(1);
    const std::vector<double> alphas = {169.5, 12.5, 52.5, 19.5, 777.5};
    std::vector<double> out(5);
    for (auto _ : state) {
        stream.dirichlet(alphas, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_DirichletDraw);

static void BM_Credible5Cell(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            credible_5cell(kTable, m, FpcAdjustment::fpc1, 0.95, ++seed).interval.lower);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Credible5Cell)->Range(1000, 100000)->Complexity();

static void BM_GenerateReplication(benchmark::State& state) {
    SimScenario sc = preset_scenario("t6/N250/psi0.25");
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream stream(sc.master_seed, ++rep);
        benchmark::DoNotOptimize(generate_replication(sc, stream).n6);
    }
}
BENCHMARK(BM_GenerateReplication);

static void BM_Srswor(benchmark::State& state) {
    RngStream stream(9);
    const auto n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stream.srswor(n, n / 4).size());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Srswor)->Range(1000, 100000)->Complexity();

static void BM_RunScenarioTiny(benchmark::State& state) {
    SimScenario sc = preset_scenario("b1/N13/psi0.1");
    sc.replications = 50;
    sc.credible_draws = 200;
    sc.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(sc).n5.mean);
    }
}
BENCHMARK(BM_RunScenarioTiny);

BENCHMARK_MAIN();
