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

#include "mistriage/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mistriage/stats.hpp"

namespace mistriage {

// ---------------------------------------------------------------- config

void TrainConfig::validate() const {
  if (!(base_lr > 0.0)) throw InvalidArgument("base_lr must be positive");
  if (!(warmup_frac >= 0.0 && warmup_frac < 1.0)) {
    throw InvalidArgument("warmup_frac must be in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw InvalidArgument("weight_decay must be non-negative");
  if (batch_size == 0) throw InvalidArgument("batch_size must be positive");
  if (max_epochs == 0) throw InvalidArgument("max_epochs must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw InvalidArgument("Adam betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(clip_norm >= 0.0)) throw InvalidArgument("clip_norm must be non-negative");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"base_lr", base_lr},       {"warmup_frac", warmup_frac},
          {"weight_decay", weight_decay}, {"batch_size", batch_size},
          {"max_epochs", max_epochs}, {"patience", patience},
          {"seed", seed},             {"beta1", beta1},
          {"beta2", beta2},           {"epsilon", epsilon},
          {"clip_norm", clip_norm}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.base_lr = j.at("base_lr").get<double>();
  c.warmup_frac = j.at("warmup_frac").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.validate();
  return c;
}

// ---------------------------------------------------------------- schedule

std::size_t warmup_steps(std::size_t total_steps, double warmup_frac) {
  // The product is nudged down so 0.1 * 1000 stays 100 rather than 101.
  return static_cast<std::size_t>(
      std::ceil(warmup_frac * static_cast<double>(total_steps) - 1e-9));
}

double lr_at(std::size_t step, std::size_t total_steps, const TrainConfig& cfg) {
  if (total_steps == 0) throw InvalidArgument("total_steps must be positive");
  step = std::min(step, total_steps);
  const std::size_t warm = warmup_steps(total_steps, cfg.warmup_frac);
  if (step < warm) {
    return cfg.base_lr * static_cast<double>(step) / static_cast<double>(warm);
  }
  if (warm == total_steps) return cfg.base_lr;
  return cfg.base_lr * static_cast<double>(total_steps - step) /
         static_cast<double>(total_steps - warm);
}

// ---------------------------------------------------------------- AdamW

AdamState AdamState::zeros_like(const ModelConfig& config) {
  return {ModelParams::zeros(config), ModelParams::zeros(config), 0};
}

void adamw_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, std::int64_t t, double lr, double weight_decay,
                  const TrainConfig& cfg) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    const double p = param[i];
    param[i] = p - lr * weight_decay * p - lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

namespace {

std::span<double> flat(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> flat(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

// Zips the tensors of several identically shaped parameter sets.
template <typename F>
void zip_tensors(ModelParams& params, const ModelParams& grads, AdamState& state, F&& f) {
  std::vector<const Matrix*> g;
  grads.visit([&](const std::string&, const Matrix& t, bool) { g.push_back(&t); });
  std::vector<Matrix*> m, v;
  state.m.visit([&](const std::string&, Matrix& t, bool) { m.push_back(&t); });
  state.v.visit([&](const std::string&, Matrix& t, bool) { v.push_back(&t); });
  std::size_t i = 0;
  params.visit([&](const std::string& name, Matrix& p, bool decays) {
    f(name, p, *g[i], *m[i], *v[i], decays);
    ++i;
  });
}

}  // namespace

void adamw_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
                const TrainConfig& cfg) {
  grads.visit([](const std::string& name, const Matrix& g, bool) {
    if (!g.allFinite()) throw NumericError("non-finite gradient in " + name);
  });
  ++state.step;
  zip_tensors(params, grads, state,
              [&](const std::string&, Matrix& p, const Matrix& g, Matrix& m, Matrix& v,
                  bool decays) {
                adamw_update(flat(p), flat(g), flat(m), flat(v), state.step, lr,
                             decays ? cfg.weight_decay : 0.0, cfg);
              });
}

double clip_global_norm(ModelParams& grads, double max_norm) {
  double sq = 0.0;
  grads.visit([&](const std::string&, const Matrix& g, bool) { sq += g.squaredNorm(); });
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    grads.visit([&](const std::string&, Matrix& g, bool) { g *= s; });
  }
  return norm;
}

// ---------------------------------------------------------------- history

std::string TrainHistory::to_jsonl(const nlohmann::json& extra) const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::json j = {{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"val_accuracy", e.val_accuracy},
                        {"val_macro_f1", e.val_macro_f1},
                        {"lr", e.lr}};
    out += j.dump() + "\n";
  }
  nlohmann::json summary = {{"summary", true},
                            {"epochs_run", epochs.size()},
                            {"best_epoch", best_epoch},
                            {"total_steps", total_steps},
                            {"stopped_early", stopped_early}};
  for (const auto& [key, value] : extra.items()) summary[key] = value;
  out += summary.dump() + "\n";
  return out;
}

// ---------------------------------------------------------------- loop

namespace {

constexpr std::size_t kEvalBatch = 64;

std::vector<InfoLabel> labels_of(std::span<const TokenSequence> seqs) {
  std::vector<InfoLabel> labels;
  labels.reserve(seqs.size());
  for (const auto& s : seqs) {
    if (!s.label) throw InvalidArgument("training sequence without a label");
    labels.push_back(*s.label);
  }
  return labels;
}

ConfusionMatrix evaluate_split(std::span<const TokenSequence> seqs, const ModelParams& params,
                               const ModelConfig& cfg) {
  const std::vector<InfoLabel> preds = predict_labels(seqs, params, cfg);
  std::vector<LabelPair> pairs;
  pairs.reserve(seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i) pairs.emplace_back(*seqs[i].label, preds[i]);
  return confusion(pairs);
}

}  // namespace

TrainResult train_model(std::span<const TokenSequence> train_set,
                        std::span<const TokenSequence> val_set, const ModelConfig& model_cfg,
                        const TrainConfig& cfg, const EpochCallback& on_epoch) {
  model_cfg.validate();
  cfg.validate();
  if (train_set.empty()) throw InvalidArgument("training split is empty");
  if (val_set.empty()) throw InvalidArgument("validation split is empty");
  const std::vector<InfoLabel> train_labels = labels_of(train_set);
  labels_of(val_set);

  ModelParams params = ModelParams::init(model_cfg, derive_seed(cfg.seed, "init"));
  AdamState adam = AdamState::zeros_like(model_cfg);
  Rng dropout_rng(derive_seed(cfg.seed, "dropout"));

  const std::size_t steps_per_epoch = (train_set.size() + cfg.batch_size - 1) / cfg.batch_size;
  TrainResult result;
  result.history.total_steps = steps_per_epoch * cfg.max_epochs;
  const std::size_t total_steps = result.history.total_steps;

  ModelParams best = params;
  double best_f1 = -1.0;
  std::size_t since_best = 0;
  std::size_t step = 0;
  std::vector<TokenSequence> batch;
  std::vector<InfoLabel> batch_labels;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", epoch));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    double lr = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      batch_labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_set[order[i]]);
        batch_labels.push_back(train_labels[order[i]]);
      }
      const ForwardResult fwd = forward(batch, params, model_cfg, Mode::kTrain, &dropout_rng);
      const double loss = cross_entropy(fwd.logits, batch_labels);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged(fmt::format("loss became non-finite at step {}", step), best,
                               result.history);
      }
      loss_sum += loss * static_cast<double>(batch.size());
      ModelParams grads = backward(fwd, batch_labels, params, model_cfg);
      clip_global_norm(grads, cfg.clip_norm);
      lr = lr_at(step, total_steps, cfg);
      adamw_step(params, grads, adam, lr, cfg);
      ++step;
    }

    const ClassMetrics val = class_metrics(evaluate_split(val_set, params, model_cfg));
    EpochRecord record{epoch, loss_sum / static_cast<double>(train_set.size()), val.accuracy,
                       val.macro_f1, lr};
    result.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);

    if (val.macro_f1 > best_f1) {
      best_f1 = val.macro_f1;
      best = params;
      result.history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= std::max<std::size_t>(cfg.patience, 1)) {
      result.history.stopped_early = true;
      break;
    }
  }
  result.params = std::move(best);
  return result;
}

std::vector<InfoLabel> predict_labels(std::span<const TokenSequence> seqs,
                                      const ModelParams& params, const ModelConfig& config) {
  std::vector<InfoLabel> out;
  out.reserve(seqs.size());
  for (std::size_t start = 0; start < seqs.size(); start += kEvalBatch) {
    const auto chunk = seqs.subspan(start, std::min(kEvalBatch, seqs.size() - start));
    for (const auto& p : predict(chunk, params, config)) out.push_back(p.label);
  }
  return out;
}

std::vector<TokenSequence> encode_subset(const CleanCorpus& corpus,
                                         std::span<const std::size_t> subset, const Vocab& vocab,
                                         std::size_t max_len, EncodingArm arm) {
  std::vector<TokenSequence> out;
  out.reserve(subset.size());
  for (std::size_t i : subset) out.push_back(encode_record(corpus[i], vocab, max_len, arm));
  return out;
}

TrainResult train(const CleanCorpus& corpus, const Splits& splits, const Vocab& vocab,
                  const ModelConfig& model_cfg, const TrainConfig& train_cfg, EncodingArm arm,
                  const EpochCallback& on_epoch) {
  if (model_cfg.vocab_size != vocab.size()) {
    throw InvalidArgument(fmt::format("model vocab_size {} != vocabulary size {}",
                                      model_cfg.vocab_size, vocab.size()));
  }
  const auto train_set = encode_subset(corpus, splits.train, vocab, model_cfg.max_positions, arm);
  const auto val_set = encode_subset(corpus, splits.val, vocab, model_cfg.max_positions, arm);
  return train_model(train_set, val_set, model_cfg, train_cfg, on_epoch);
}

}  // namespace mistriage
