#include <memory>
#include <string>

#include <benchmark/benchmark.h>

#include "llmpso/advisor.hpp"
#include "llmpso/hybrid.hpp"
#include "llmpso/objective.hpp"
#include "llmpso/swarm.hpp"

using namespace llmpso;

static void BM_StepRastrigin(benchmark::State& state) {
    const auto space = SearchSpace::rastrigin();
    ObjectiveHandle objective(std::make_unique<RastriginObjective>(), space);
    SwarmConfig config;
    config.pop_size = static_cast<std::size_t>(state.range(0));
    config.coefficients = {0.95, 0.5, 0.5};
    Swarm swarm = initialize_swarm(config, space, 1);
    evaluate_initial(swarm, objective);
    for (auto _ : state) benchmark::DoNotOptimize(step(swarm, objective));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StepRastrigin)->Arg(20)->Arg(100);

static void BM_SyntheticLandscape(benchmark::State& state) {
    int n = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthetic_landscape(3, n));
        n = n == 200 ? 2 : n + 1;
    }
}
BENCHMARK(BM_SyntheticLandscape);

static void BM_GridScan(benchmark::State& state) {
    const auto space = SearchSpace::neurons_layers();
    ObjectiveHandle objective(std::make_unique<SyntheticObjective>(space), space);
    for (auto _ : state) benchmark::DoNotOptimize(scan_grid(objective));
}
BENCHMARK(BM_GridScan);

static SwarmSnapshot snapshot(std::size_t npop) {
    const auto space = SearchSpace::neurons_layers();
    SwarmConfig config;
    config.pop_size = npop;
    ObjectiveHandle objective(std::make_unique<SyntheticObjective>(space), space);
    Swarm swarm = initialize_swarm(config, space, 3);
    evaluate_initial(swarm, objective);
    return snapshot_of(swarm);
}

static void BM_BuildPrompt(benchmark::State& state) {
    const auto snap = snapshot(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_prompt(snap));
}
BENCHMARK(BM_BuildPrompt)->Arg(5)->Arg(100);

static void BM_ParseResponse(benchmark::State& state) {
    const auto npop = static_cast<std::size_t>(state.range(0));
    const auto snap = snapshot(npop);
    rng_type rng(5);
    const std::string text = render_response(heuristic_mock_suggest(snap, rng), snap.space);
    for (auto _ : state) benchmark::DoNotOptimize(parse_response(text, npop, snap.space));
}
BENCHMARK(BM_ParseResponse)->Arg(5)->Arg(100);

static void BM_HybridRunOracle(benchmark::State& state) {
    const auto space = SearchSpace::neurons_layers();
    RunConfig config;
    config.stop.target_cost = 0.13;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        ObjectiveHandle objective(std::make_unique<SyntheticObjective>(space), space);
        MockAdvisor oracle(seed, std::vector<double>{120, 3});
        config.seed = seed++;
        benchmark::DoNotOptimize(run_llm_pso(config, objective, oracle));
    }
}
BENCHMARK(BM_HybridRunOracle);

BENCHMARK_MAIN();
