/*
 * Copyright 2026 The mistriage Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <benchmark/benchmark.h>

#include "mistriage/stats.hpp"

namespace mistriage {
namespace {

ConfusionMatrix test_sized_matrix() {
  ConfusionMatrix cm;
  cm.counts = {{{210, 95, 8}, {78, 699, 62}, {6, 77, 158}}};
  return cm;
}

void BM_BootstrapMacroF1(benchmark::State& state) {
  const auto pairs = expand(test_sized_matrix());
  const auto iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_ci(pairs, Metric::kMacroF1, iterations, 0.05, 7).lower);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BootstrapMacroF1)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_ClassMetrics(benchmark::State& state) {
  const auto cm = test_sized_matrix();
  for (auto _ : state) benchmark::DoNotOptimize(class_metrics(cm).macro_f1);
}
BENCHMARK(BM_ClassMetrics);

void BM_Confusion(benchmark::State& state) {
  const auto pairs = expand(test_sized_matrix());
  for (auto _ : state) benchmark::DoNotOptimize(confusion(pairs).counts[0][0]);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}
BENCHMARK(BM_Confusion);

}  // namespace
}  // namespace mistriage

BENCHMARK_MAIN();
