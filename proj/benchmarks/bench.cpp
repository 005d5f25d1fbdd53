#include <benchmark/benchmark.h>

#include <string>

#include "bribery/markov.hpp"
#include "bribery/simulate.hpp"
#include "bribery/strategies.hpp"

namespace {

using namespace bribery;

Scenario table2() {
  return with_start_state(make_scenario(load_pool_file(std::string(BRIBERY_DATA_DIR) +
                                                       "/table2.pools"),
                                        "P2", 6, 1, 6.25),
                          4);
}

AbsorbingChain chain_of(std::size_t h) {
  std::vector<double> fork(h);
  for (std::size_t i = 0; i < h; ++i) fork[i] = 0.2 + 0.5 * static_cast<double>(i % 3) / 3.0;
  return AbsorbingChain(std::move(fork));
}

void BM_Analyze(benchmark::State& state) {
  const AbsorbingChain chain = chain_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(analyze(chain));
}
BENCHMARK(BM_Analyze)->Arg(7)->Arg(32)->Arg(128);

void BM_SuccessProbabilities(benchmark::State& state) {
  const AbsorbingChain chain = chain_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(success_probabilities(chain));
}
BENCHMARK(BM_SuccessProbabilities)->Arg(7)->Arg(32)->Arg(128);

void BM_RunGvc(benchmark::State& state) {
  const Scenario s = table2();
  BribeSchedule schedule;
  schedule.bribes = {25.51, 6.43, kSatoshi, 72.25, 37.02, 8.6, kSatoshi};
  for (auto _ : state) benchmark::DoNotOptimize(run_gvc(s, schedule));
}
BENCHMARK(BM_RunGvc);

void BM_OptimizeGvc(benchmark::State& state) {
  const Scenario s = table2();
  GvcSearchOptions options;
  options.restarts = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_gvc(s, GvcObjective::kAverageCost, options));
  }
}
BENCHMARK(BM_OptimizeGvc)->Arg(0)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const Scenario s = table2();
  const RacePolicy policy = policy_from(run_bff(s));
  SimConfig config;
  config.trials = 100'000;
  config.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_race(s, policy, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.trials));
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
