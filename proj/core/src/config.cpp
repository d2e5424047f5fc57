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

#include <set>

#include "mistriage/error.hpp"
#include "mistriage/hashing.hpp"

namespace mistriage {
namespace {

using Json = nlohmann::json;

void check_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ParseError("config: " + where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ParseError("config: unknown key " + where + "." + key);
  }
}

template <typename T>
void read(const Json& section, const char* key, T& out, const std::string& where) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ParseError("config: bad value for " + where + "." + key);
  }
}

const Json& section(const Json& j, const char* name) {
  static const Json kEmpty = Json::object();
  return j.contains(name) ? j.at(name) : kEmpty;
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j) {
  check_keys(j, "<root>",
             {"seed", "paths", "split", "tokenizer", "encoding", "model", "train", "eval",
              "ablate", "report"});
  RunConfig c;
  read(j, "seed", c.seed, "<root>");

  const Json& paths = section(j, "paths");
  check_keys(paths, "paths", {"corpus", "out"});
  read(paths, "corpus", c.corpus_path, "paths");
  read(paths, "out", c.out_dir, "paths");

  const Json& split = section(j, "split");
  check_keys(split, "split", {"train", "val", "test"});
  read(split, "train", c.split_ratios[0], "split");
  read(split, "val", c.split_ratios[1], "split");
  read(split, "test", c.split_ratios[2], "split");

  const Json& tok = section(j, "tokenizer");
  check_keys(tok, "tokenizer", {"target_size"});
  read(tok, "target_size", c.tokenizer.target_size, "tokenizer");

  const Json& enc = section(j, "encoding");
  check_keys(enc, "encoding", {"arm", "max_len"});
  if (enc.contains("arm")) {
    std::string arm;
    read(enc, "arm", arm, "encoding");
    c.arm = parse_encoding_arm(arm);
  }
  read(enc, "max_len", c.max_len, "encoding");

  const Json& model = section(j, "model");
  check_keys(model, "model",
             {"layers", "heads", "hidden", "ff_dim", "dropout", "init_std", "layer_norm_eps"});
  read(model, "layers", c.model.layers, "model");
  read(model, "heads", c.model.heads, "model");
  read(model, "hidden", c.model.hidden, "model");
  read(model, "ff_dim", c.model.ff_dim, "model");
  read(model, "dropout", c.model.dropout, "model");
  read(model, "init_std", c.model.init_std, "model");
  read(model, "layer_norm_eps", c.model.layer_norm_eps, "model");

  const Json& train = section(j, "train");
  check_keys(train, "train",
             {"base_lr", "warmup_frac", "weight_decay", "batch_size", "max_epochs", "patience",
              "beta1", "beta2", "epsilon", "clip_norm"});
  read(train, "base_lr", c.train.base_lr, "train");
  read(train, "warmup_frac", c.train.warmup_frac, "train");
  read(train, "weight_decay", c.train.weight_decay, "train");
  read(train, "batch_size", c.train.batch_size, "train");
  read(train, "max_epochs", c.train.max_epochs, "train");
  read(train, "patience", c.train.patience, "train");
  read(train, "beta1", c.train.beta1, "train");
  read(train, "beta2", c.train.beta2, "train");
  read(train, "epsilon", c.train.epsilon, "train");
  read(train, "clip_norm", c.train.clip_norm, "train");

  const Json& ev = section(j, "eval");
  check_keys(ev, "eval", {"bootstrap_iterations", "alpha"});
  read(ev, "bootstrap_iterations", c.bootstrap_iterations, "eval");
  read(ev, "alpha", c.alpha, "eval");

  const Json& ab = section(j, "ablate");
  check_keys(ab, "ablate", {"baseline"});
  if (ab.contains("baseline")) {
    std::string arm;
    read(ab, "baseline", arm, "ablate");
    c.ablate_baseline = parse_encoding_arm(arm);
  }

  const Json& rep = section(j, "report");
  check_keys(rep, "report", {"figures"});
  read(rep, "figures", c.figures, "report");

  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  return from_json(j);
}

void RunConfig::validate() const {
  split_spec().validate();
  if (max_len < kMinMaxLen) throw InvalidArgument("encoding.max_len is below the minimum");
  model_config(kNumSpecials + 1).validate();
  train_config().validate();
  if (bootstrap_iterations == 0) throw InvalidArgument("eval.bootstrap_iterations must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("eval.alpha must be in (0, 1)");
  if (tokenizer.target_size <= static_cast<std::size_t>(kNumSpecials)) {
    throw InvalidArgument("tokenizer.target_size is too small");
  }
}

Json RunConfig::resolved() const {
  Json model_json = model.to_json();
  model_json.erase("vocab_size");
  model_json["max_positions"] = max_len;
  return {
      {"seed", seed},
      {"split",
       {{"train", split_ratios[0]}, {"val", split_ratios[1]}, {"test", split_ratios[2]}}},
      {"tokenizer", {{"target_size", tokenizer.target_size}}},
      {"encoding", {{"arm", std::string(to_string(arm))}, {"max_len", max_len}}},
      {"model", model_json},
      {"train", train_config().to_json()},
      {"eval", {{"bootstrap_iterations", bootstrap_iterations}, {"alpha", alpha}, {"seed", seed}}},
      {"ablate", {{"baseline", std::string(to_string(ablate_baseline))}}},
      {"report", {{"figures", figures}}},
  };
}

Json RunConfig::to_json() const {
  Json j = resolved();
  j["paths"] = {{"corpus", corpus_path}, {"out", out_dir}};
  return j;
}

std::string RunConfig::hash() const { return sha256_hex(resolved().dump()); }

SplitSpec RunConfig::split_spec() const { return {split_ratios, seed}; }

ModelConfig RunConfig::model_config(std::size_t vocab_size) const {
  ModelConfig m = model;
  m.vocab_size = vocab_size;
  m.max_positions = max_len;
  return m;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

EvalOptions RunConfig::eval_options() const { return {bootstrap_iterations, alpha, seed}; }

}  // namespace mistriage
