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

#include <vector>

#include "mistriage/model.hpp"
#include "mistriage/train.hpp"

namespace mistriage {
namespace {

ModelConfig desk_config(std::size_t max_len) {
  ModelConfig c;
  c.vocab_size = 8000;
  c.max_positions = max_len;
  c.dropout = 0.0;
  return c;
}

std::vector<TokenSequence> batch_of(std::size_t batch, std::size_t max_len, std::size_t vocab) {
  Rng rng(1);
  std::vector<TokenSequence> out;
  for (std::size_t b = 0; b < batch; ++b) {
    std::vector<TokenId> title, desc;
    const auto nt = 4 + rng.uniform_index(12);
    const auto nd = rng.uniform_index(max_len);
    for (std::uint64_t i = 0; i < nt; ++i)
      title.push_back(static_cast<TokenId>(kNumSpecials + rng.uniform_index(vocab - kNumSpecials)));
    for (std::uint64_t i = 0; i < nd; ++i)
      desc.push_back(static_cast<TokenId>(kNumSpecials + rng.uniform_index(vocab - kNumSpecials)));
    out.push_back(assemble_pair(title, desc, max_len));
    out.back().label = kInfoLabels[b % 3];
  }
  return out;
}

void BM_ForwardEval(benchmark::State& state) {
  const auto max_len = static_cast<std::size_t>(state.range(0));
  const auto cfg = desk_config(max_len);
  const auto params = ModelParams::init(cfg, 1);
  const auto batch = batch_of(16, max_len, cfg.vocab_size);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(batch, params, cfg, Mode::kEval).logits.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_ForwardEval)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto max_len = static_cast<std::size_t>(state.range(0));
  const auto cfg = desk_config(max_len);
  const auto params = ModelParams::init(cfg, 1);
  const auto batch = batch_of(16, max_len, cfg.vocab_size);
  std::vector<InfoLabel> labels;
  for (const auto& s : batch) labels.push_back(*s.label);
  for (auto _ : state) {
    const auto fwd = forward(batch, params, cfg, Mode::kTrain);
    benchmark::DoNotOptimize(backward(fwd, labels, params, cfg).head_bias.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_AdamWStep(benchmark::State& state) {
  const auto cfg = desk_config(128);
  auto params = ModelParams::init(cfg, 1);
  const auto grads = ModelParams::init(cfg, 2);
  auto adam = AdamState::zeros_like(cfg);
  const TrainConfig tc;
  for (auto _ : state) adamw_step(params, grads, adam, 1e-6, tc);
  state.counters["params"] = static_cast<double>(params.parameter_count());
}
BENCHMARK(BM_AdamWStep)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mistriage
