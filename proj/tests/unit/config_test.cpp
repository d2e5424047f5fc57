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


#include "mistriage/config.hpp"

#include <gtest/gtest.h>

#include "mistriage/error.hpp"
#include "mistriage/hashing.hpp"
#include "synthetic.hpp"

namespace mistriage {
namespace {

using nlohmann::json;

TEST(RunConfig, DefaultsFromEmptyDocument) {
  const auto c = RunConfig::from_json(json::object());
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.split_ratios, (std::array<double, 3>{0.70, 0.15, 0.15}));
  EXPECT_EQ(c.arm, EncodingArm::kPair);
  EXPECT_EQ(c.bootstrap_iterations, 5000u);
  EXPECT_EQ(c.train.warmup_frac, 0.10);
  EXPECT_EQ(c.train.weight_decay, 0.01);
  EXPECT_EQ(c.ablate_baseline, EncodingArm::kSingle);
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, SectionsParsed) {
  const auto c = RunConfig::from_json(json::parse(R"({
    "seed": 9,
    "paths": {"corpus": "raw.csv", "out": "o"},
    "split": {"train": 0.8, "val": 0.1, "test": 0.1},
    "tokenizer": {"target_size": 300},
    "encoding": {"arm": "single", "max_len": 64},
    "model": {"layers": 1, "heads": 2, "hidden": 16, "ff_dim": 32, "dropout": 0.0},
    "train": {"base_lr": 0.002, "batch_size": 8, "patience": 0},
    "eval": {"bootstrap_iterations": 100, "alpha": 0.1},
    "ablate": {"baseline": "pair"},
    "report": {"figures": false}
  })"));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.corpus_path, "raw.csv");
  EXPECT_EQ(c.out_dir, "o");
  EXPECT_EQ(c.split_spec().ratios[0], 0.8);
  EXPECT_EQ(c.split_spec().seed, 9u);
  EXPECT_EQ(c.tokenizer.target_size, 300u);
  EXPECT_EQ(c.arm, EncodingArm::kSingle);
  const auto m = c.model_config(77);
  EXPECT_EQ(m.vocab_size, 77u);
  EXPECT_EQ(m.max_positions, 64u);
  EXPECT_EQ(m.hidden, 16u);
  EXPECT_EQ(c.train_config().seed, 9u);
  EXPECT_EQ(c.train_config().batch_size, 8u);
  EXPECT_EQ(c.eval_options().seed, 9u);
  EXPECT_EQ(c.eval_options().alpha, 0.1);
  EXPECT_EQ(c.ablate_baseline, EncodingArm::kPair);
  EXPECT_FALSE(c.figures);
}

TEST(RunConfig, UnknownKeysRejected) {
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"sed": 1})")), ParseError);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"train": {"lr": 1}})")), ParseError);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"model": {"vocab_size": 10}})")), ParseError);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"train": {"seed": 3}})")), ParseError);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"seed": "one"})")), ParseError);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"([1, 2])")), ParseError);
}

TEST(RunConfig, ValidationErrors) {
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"split": {"train": 0.9, "val": 0.2, "test": 0.1}})")),
               InvalidArgument);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"encoding": {"max_len": 4}})")),
               InvalidArgument);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"eval": {"alpha": 1.5}})")), InvalidArgument);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"encoding": {"arm": "both"}})")),
               InvalidArgument);
}

TEST(RunConfig, HashIgnoresPathsOnly) {
  const auto a = RunConfig::from_json(json::parse(R"({"seed": 1, "paths": {"out": "x"}})"));
  const auto b = RunConfig::from_json(json::parse(R"({"seed": 1, "paths": {"out": "y", "corpus": "z"}})"));
  const auto c = RunConfig::from_json(json::parse(R"({"seed": 2})"));
  const auto d = RunConfig::from_json(json::parse(R"({"seed": 1, "train": {"base_lr": 0.01}})"));
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_NE(a.hash(), d.hash());
  EXPECT_EQ(a.hash(), sha256_hex(a.resolved().dump()));
  EXPECT_FALSE(a.resolved().contains("paths"));
  EXPECT_TRUE(a.to_json().contains("paths"));
}

TEST(RunConfig, ResolvedCarriesSeedAndDerivedSizes) {
  const auto a = RunConfig::from_json(json::parse(R"({"seed": 5, "encoding": {"max_len": 40}})"));
  const auto r = a.resolved();
  EXPECT_EQ(r.at("seed"), 5);
  EXPECT_EQ(r.at("model").at("max_positions"), 40);
  EXPECT_FALSE(r.at("model").contains("vocab_size"));
}

TEST(RunConfig, LoadFromFile) {
  const auto dir = synthetic::temp_dir("config");
  write_file(dir / "c.json", R"({"seed": 4})");
  EXPECT_EQ(RunConfig::load((dir / "c.json").string()).seed, 4u);
  write_file(dir / "bad.json", "{not json");
  EXPECT_THROW(RunConfig::load((dir / "bad.json").string()), ParseError);
  EXPECT_THROW(RunConfig::load((dir / "missing.json").string()), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mistriage
