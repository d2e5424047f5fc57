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

// Experiment configuration as one JSON document:
//
//   {
//     "seed": 0,
//     "paths":     {"corpus": "...", "out": "out"},
//     "split":     {"train": 0.70, "val": 0.15, "test": 0.15},
//     "tokenizer": {"target_size": 8000},
//     "encoding":  {"arm": "pair", "max_len": 128},
//     "model":     {"layers": 2, "heads": 4, ...},
//     "train":     {"base_lr": 3e-4, ...},
//     "eval":      {"bootstrap_iterations": 5000, "alpha": 0.05},
//     "ablate":    {"baseline": "single"},
//     "report":    {"figures": true}
//   }
//
// Every section and key is optional; missing values take their defaults.
// Unknown keys are errors. The single top-level seed feeds the split, the
// initializer, batch shuffling, dropout and the bootstrap.

#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "mistriage/corpus.hpp"
#include "mistriage/encoding.hpp"
#include "mistriage/model.hpp"
#include "mistriage/stats.hpp"
#include "mistriage/tokenizer.hpp"
#include "mistriage/train.hpp"

namespace mistriage {

struct RunConfig {
  std::uint64_t seed = 0;

  std::string corpus_path;
  std::string out_dir = "out";

  std::array<double, 3> split_ratios = {0.70, 0.15, 0.15};
  TrainerOptions tokenizer;
  EncodingArm arm = EncodingArm::kPair;
  std::size_t max_len = 128;
  ModelConfig model;  // vocab_size comes from the vocabulary, max_positions from max_len
  TrainConfig train;  // seed comes from the top level
  std::size_t bootstrap_iterations = 5000;
  double alpha = 0.05;
  EncodingArm ablate_baseline = EncodingArm::kSingle;
  bool figures = true;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);

  // Everything except `paths`, with the seed propagated into each section.
  nlohmann::json resolved() const;
  nlohmann::json to_json() const;  // resolved() plus paths
  // sha256 of resolved().dump(); paths do not affect results.
  std::string hash() const;

  SplitSpec split_spec() const;
  ModelConfig model_config(std::size_t vocab_size) const;
  TrainConfig train_config() const;
  EvalOptions eval_options() const;

  void validate() const;
};

}  // namespace mistriage
