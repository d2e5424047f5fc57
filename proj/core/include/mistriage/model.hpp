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

// Transformer encoder classifier with hand-derived gradients.
//
// embeddings = token + position + type
// block      = LN(x + MHA(x)) -> LN(h + W2 gelu(W1 h))      (post-norm)
// logits     = head(hidden at position 0)
//
// Padding never influences the output: each sequence is compacted to its
// attention-mask-1 positions (keeping their original position ids) before
// the encoder runs, so masked keys receive exactly zero attention weight.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mistriage/corpus.hpp"
#include "mistriage/encoding.hpp"
#include "mistriage/rng.hpp"

namespace mistriage {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ModelConfig {
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t hidden = 64;
  std::size_t ff_dim = 256;
  std::size_t vocab_size = 0;
  std::size_t max_positions = 256;
  std::size_t type_vocab = 2;
  std::size_t classes = kNumClasses;
  double dropout = 0.1;
  double init_std = 0.02;
  double layer_norm_eps = 1e-12;

  // Throws InvalidArgument on zero sizes, hidden % heads != 0 or classes != 3.
  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  bool operator==(const ModelConfig&) const = default;
};

struct LayerParams {
  Matrix attn_q, attn_k, attn_v, attn_o;  // d x d
  Matrix ff_in;                          // d x ff
  Matrix ff_out;                         // ff x d
  Matrix ln1_scale, ln1_shift;           // 1 x d
  Matrix ln2_scale, ln2_shift;           // 1 x d
};

struct ModelParams {
  Matrix token_embedding;     // V x d
  Matrix position_embedding;  // P x d
  Matrix type_embedding;      // 2 x d
  std::vector<LayerParams> layers;
  Matrix head_weight;  // d x 3
  Matrix head_bias;    // 1 x 3

  // Every tensor set to zero with the shapes of `config`.
  static ModelParams zeros(const ModelConfig& config);
  // Weights ~ N(0, init_std); biases and layer-norm shifts 0; scales 1.
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);

  // Visits tensors in declared order: f(name, tensor, decays).
  // `decays` is false for biases and layer-norm parameters.
  template <typename F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <typename F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

  void check_shapes(const ModelConfig& config) const;
  bool all_finite() const;
  std::size_t parameter_count() const;

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& p, F& f) {
    f("token_embedding", p.token_embedding, true);
    f("position_embedding", p.position_embedding, true);
    f("type_embedding", p.type_embedding, true);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      auto& L = p.layers[l];
      const std::string pre = "layer" + std::to_string(l) + ".";
      f(pre + "attn_q", L.attn_q, true);
      f(pre + "attn_k", L.attn_k, true);
      f(pre + "attn_v", L.attn_v, true);
      f(pre + "attn_o", L.attn_o, true);
      f(pre + "ff_in", L.ff_in, true);
      f(pre + "ff_out", L.ff_out, true);
      f(pre + "ln1_scale", L.ln1_scale, false);
      f(pre + "ln1_shift", L.ln1_shift, false);
      f(pre + "ln2_scale", L.ln2_scale, false);
      f(pre + "ln2_shift", L.ln2_shift, false);
    }
    f("head_weight", p.head_weight, true);
    f("head_bias", p.head_bias, false);
  }
};

enum class Mode { kTrain, kEval };

// Activations retained by a train-mode forward for backward().
struct LayerCache {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> probs;  // per head, T x T
  Matrix context;
  Matrix attn_dropout;  // scaled keep mask, empty when dropout is off
  Matrix ln1_hat;
  Eigen::VectorXd ln1_inv_std;
  Matrix ln1_out;
  Matrix ff_pre;
  Matrix ff_act;
  Matrix ff_dropout;
  Matrix ln2_hat;
  Eigen::VectorXd ln2_inv_std;
};

struct SequenceCache {
  std::vector<std::size_t> positions;  // attended positions, ascending
  std::vector<TokenId> ids;
  std::vector<int> type_ids;
  Matrix embed_dropout;
  std::vector<LayerCache> layers;
  Matrix final_hidden;
};

struct ForwardResult {
  Matrix logits;  // B x 3
  std::vector<SequenceCache> caches;  // filled in train mode only
  Mode mode = Mode::kEval;
};

// dropout_rng is required in train mode when config.dropout > 0; eval mode
// never applies dropout. Throws ShapeError on mismatched inputs and
// NumericError (naming the layer) on a non-finite activation.
ForwardResult forward(std::span<const TokenSequence> batch, const ModelParams& params,
                      const ModelConfig& config, Mode mode, Rng* dropout_rng = nullptr);

// Mean softmax cross-entropy with uniform class weights.
double cross_entropy(const Matrix& logits, std::span<const InfoLabel> labels);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

// Exact gradients of cross_entropy(forward(...).logits, labels) with respect
// to every tensor. `state` must come from a train-mode forward.
ModelParams backward(const ForwardResult& state, std::span<const InfoLabel> labels,
                     const ModelParams& params, const ModelConfig& config);

struct Prediction {
  InfoLabel label;
  std::array<double, kNumClasses> probs;
};

// Argmax with ties broken toward the lowest class code.
Prediction prediction_from_logits(std::span<const double> logits);
std::vector<Prediction> predict(std::span<const TokenSequence> batch, const ModelParams& params,
                                const ModelConfig& config);

}  // namespace mistriage
