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

#include <string>
#include <vector>

#include "mistriage/encoding.hpp"
#include "mistriage/rng.hpp"
#include "mistriage/textnorm.hpp"
#include "mistriage/tokenizer.hpp"

namespace mistriage {
namespace {

const std::vector<std::string> kWords = {
    "خبر", "فوری", "علي", "كابل", "ویدیو", "می‌رود", "۱۴۰۲", "واکسن",
    "دروغ", "حقیقت", "گزارش", "رسمی", "پخش", "شبکه", "مردم", "ـــ"};

std::vector<std::string> lines(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const auto len = 6 + rng.uniform_index(20);
    for (std::uint64_t k = 0; k < len; ++k) {
      s += kWords[rng.uniform_index(kWords.size())];
      s += rng.uniform_index(5) == 0 ? "  \t" : " ";
    }
    out.push_back(std::move(s));
  }
  return out;
}

void BM_NormalizeText(benchmark::State& state) {
  const auto text = lines(256, 1);
  std::size_t bytes = 0;
  for (const auto& t : text) bytes += t.size();
  for (auto _ : state) {
    for (const auto& t : text) benchmark::DoNotOptimize(normalize_text(t).size());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_NormalizeText);

std::vector<std::string> normalized(std::size_t n, std::uint64_t seed) {
  auto out = lines(n, seed);
  for (auto& s : out) s = normalize_text(s);
  return out;
}

void BM_TrainVocab(benchmark::State& state) {
  const auto corpus = normalized(2000, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_vocab(corpus, {static_cast<std::size_t>(state.range(0))}).size());
  }
}
BENCHMARK(BM_TrainVocab)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_TokenizerEncode(benchmark::State& state) {
  const auto corpus = normalized(2000, 3);
  const auto vocab = train_vocab(corpus, {256});
  for (auto _ : state) {
    for (const auto& line : corpus) benchmark::DoNotOptimize(encode(line, vocab).size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}
BENCHMARK(BM_TokenizerEncode)->Unit(benchmark::kMillisecond);

void BM_EncodePair(benchmark::State& state) {
  const auto corpus = normalized(512, 4);
  const auto vocab = train_vocab(corpus, {256});
  for (auto _ : state) {
    for (std::size_t i = 0; i + 1 < corpus.size(); i += 2) {
      benchmark::DoNotOptimize(
          encode_pair(corpus[i], std::string_view(corpus[i + 1]), vocab, 128).ids.data());
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size() / 2));
}
BENCHMARK(BM_EncodePair)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mistriage
