// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "amafia/archive/game_log.hpp"
#include "amafia/sim/simulation.hpp"

using namespace amafia;

static void BM_SimulatedGame(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    SimConfig cfg;
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run_simulated_game(cfg));
  }
}
BENCHMARK(BM_SimulatedGame)->Unit(benchmark::kMillisecond);

static void BM_EncodeParseLog(benchmark::State& state) {
  SimConfig cfg;
  cfg.seed = 3;
  const auto log = run_simulated_game(cfg).log;
  for (auto _ : state) benchmark::DoNotOptimize(parse_log(encode_log(log)));
}
BENCHMARK(BM_EncodeParseLog)->Unit(benchmark::kMicrosecond);
