// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "amafia/stats/lda.hpp"

using namespace amafia::stats;

static void BM_FitLda(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise;
  Rows x;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(d);
    for (auto& v : row) v = noise(gen);
    y.push_back(static_cast<int>(i % 2));
    row[0] += y.back();
    x.push_back(std::move(row));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_lda(x, y));
}
// 1536 matches the width of common hosted embedding models.
BENCHMARK(BM_FitLda)->Args({2000, 64})->Args({2600, 1536})->Unit(benchmark::kMillisecond);
