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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mistriage/corpus.hpp"
#include "mistriage/encoding.hpp"
#include "mistriage/error.hpp"
#include "mistriage/model.hpp"
#include "mistriage/tokenizer.hpp"

namespace mistriage {

struct TrainConfig {
  // 2e-5 is the usual rate for fine-tuning a pretrained encoder; a small
  // randomly initialized model needs a larger one.
  double base_lr = 3e-4;
  double warmup_frac = 0.10;
  double weight_decay = 0.01;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 20;
  std::size_t patience = 3;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;  // global gradient norm; 0 disables clipping

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  bool operator==(const TrainConfig&) const = default;
};

std::size_t warmup_steps(std::size_t total_steps, double warmup_frac);

// Linear 0 -> base_lr over the first ceil(warmup_frac * total) steps, then
// linear base_lr -> 0 at total_steps.
double lr_at(std::size_t step, std::size_t total_steps, const TrainConfig& cfg);

struct AdamState {
  ModelParams m;
  ModelParams v;
  std::int64_t step = 0;

  static AdamState zeros_like(const ModelConfig& config);
};

// One AdamW update of a flat tensor with the step counter already advanced
// to `t` (t >= 1). Decoupled decay p <- p - lr * wd * p is applied to the
// pre-update value, separately from the bias-corrected Adam step.
void adamw_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, std::int64_t t, double lr, double weight_decay,
                  const TrainConfig& cfg);

// Advances state.step and updates every tensor; biases and layer-norm
// parameters get no weight decay. Throws NumericError on a non-finite
// gradient, naming the tensor.
void adamw_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
                const TrainConfig& cfg);

// Scales all gradients so their global L2 norm is at most max_norm. Returns
// the norm before clipping.
double clip_global_norm(ModelParams& grads, double max_norm);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double val_macro_f1 = 0.0;
  double lr = 0.0;  // learning rate after the epoch's last update

  bool operator==(const EpochRecord&) const = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  std::size_t total_steps = 0;
  bool stopped_early = false;

  // One JSON object per epoch followed by a summary record; `extra` keys are
  // merged into the summary.
  std::string to_jsonl(const nlohmann::json& extra = nlohmann::json::object()) const;
  bool operator==(const TrainHistory&) const = default;
};

struct TrainResult {
  ModelParams params;  // from best_epoch
  TrainHistory history;
};

// The loss went non-finite. Carries the best parameters seen so far.
class TrainingDiverged : public NumericError {
 public:
  TrainingDiverged(std::string what, ModelParams last_good, TrainHistory history)
      : NumericError(std::move(what)),
        last_good_(std::move(last_good)),
        history_(std::move(history)) {}
  const ModelParams& last_good() const { return last_good_; }
  const TrainHistory& history() const { return history_; }

 private:
  ModelParams last_good_;
  TrainHistory history_;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains on labelled sequences with early stopping on validation macro F1
// (strict improvement; the earliest best epoch wins ties). Stops once
// `patience` consecutive epochs fail to improve; patience 0 behaves as 1.
TrainResult train_model(std::span<const TokenSequence> train_set,
                        std::span<const TokenSequence> val_set, const ModelConfig& model_cfg,
                        const TrainConfig& train_cfg, const EpochCallback& on_epoch = {});

// Eval-mode predictions in fixed-size chunks.
std::vector<InfoLabel> predict_labels(std::span<const TokenSequence> seqs,
                                      const ModelParams& params, const ModelConfig& config);

std::vector<TokenSequence> encode_subset(const CleanCorpus& corpus,
                                         std::span<const std::size_t> subset, const Vocab& vocab,
                                         std::size_t max_len, EncodingArm arm);

// Encodes the train and validation splits with `arm` and trains.
TrainResult train(const CleanCorpus& corpus, const Splits& splits, const Vocab& vocab,
                  const ModelConfig& model_cfg, const TrainConfig& train_cfg, EncodingArm arm,
                  const EpochCallback& on_epoch = {});

}  // namespace mistriage
