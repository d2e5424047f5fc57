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

#include "mistriage/model.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mistriage/error.hpp"

namespace mistriage {

// ---------------------------------------------------------------- config

void ModelConfig::validate() const {
  if (layers == 0 || heads == 0 || hidden == 0 || ff_dim == 0 || vocab_size == 0 ||
      max_positions == 0) {
    throw InvalidArgument("model sizes must be positive");
  }
  if (hidden % heads != 0) {
    throw InvalidArgument(fmt::format("hidden {} is not divisible by heads {}", hidden, heads));
  }
  if (type_vocab != 2) throw InvalidArgument("type_vocab must be 2");
  if (classes != kNumClasses) throw InvalidArgument("classes must be 3");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("dropout must be in [0, 1)");
  if (!(init_std > 0.0)) throw InvalidArgument("init_std must be positive");
  if (!(layer_norm_eps > 0.0)) throw InvalidArgument("layer_norm_eps must be positive");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"layers", layers},       {"heads", heads},
          {"hidden", hidden},       {"ff_dim", ff_dim},
          {"vocab_size", vocab_size}, {"max_positions", max_positions},
          {"type_vocab", type_vocab}, {"classes", classes},
          {"dropout", dropout},     {"init_std", init_std},
          {"layer_norm_eps", layer_norm_eps}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.layers = j.at("layers").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.ff_dim = j.at("ff_dim").get<std::size_t>();
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.max_positions = j.at("max_positions").get<std::size_t>();
  c.type_vocab = j.at("type_vocab").get<std::size_t>();
  c.classes = j.at("classes").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.init_std = j.at("init_std").get<double>();
  c.layer_norm_eps = j.at("layer_norm_eps").get<double>();
  c.validate();
  return c;
}

// ---------------------------------------------------------------- params

ModelParams ModelParams::zeros(const ModelConfig& config) {
  config.validate();
  const auto d = static_cast<Eigen::Index>(config.hidden);
  const auto ff = static_cast<Eigen::Index>(config.ff_dim);
  auto z = [](Eigen::Index r, Eigen::Index c) { return Matrix(Matrix::Zero(r, c)); };
  ModelParams p;
  p.token_embedding = z(static_cast<Eigen::Index>(config.vocab_size), d);
  p.position_embedding = z(static_cast<Eigen::Index>(config.max_positions), d);
  p.type_embedding = z(2, d);
  p.layers.resize(config.layers);
  for (auto& L : p.layers) {
    L.attn_q = z(d, d);
    L.attn_k = z(d, d);
    L.attn_v = z(d, d);
    L.attn_o = z(d, d);
    L.ff_in = z(d, ff);
    L.ff_out = z(ff, d);
    L.ln1_scale = z(1, d);
    L.ln1_shift = z(1, d);
    L.ln2_scale = z(1, d);
    L.ln2_shift = z(1, d);
  }
  p.head_weight = z(d, 3);
  p.head_bias = z(1, 3);
  return p;
}

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = zeros(config);
  Rng rng(seed);
  p.visit([&](const std::string& name, Matrix& m, bool decays) {
    if (name.ends_with("_scale")) {
      m.setOnes();
    } else if (decays) {
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, config.init_std);
    }
  });
  return p;
}

void ModelParams::check_shapes(const ModelConfig& config) const {
  const ModelParams expected = zeros(config);
  if (layers.size() != expected.layers.size()) {
    throw ShapeError(fmt::format("params have {} layers, config {}", layers.size(),
                                 expected.layers.size()));
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  expected.visit([&](const std::string&, const Matrix& m, bool) {
    shapes.emplace_back(m.rows(), m.cols());
  });
  std::size_t i = 0;
  visit([&](const std::string& name, const Matrix& m, bool) {
    if (m.rows() != shapes[i].first || m.cols() != shapes[i].second) {
      throw ShapeError(fmt::format("{} is {}x{}, expected {}x{}", name, m.rows(), m.cols(),
                                   shapes[i].first, shapes[i].second));
    }
    ++i;
  });
}

bool ModelParams::all_finite() const {
  bool finite = true;
  visit([&](const std::string&, const Matrix& m, bool) { finite = finite && m.allFinite(); });
  return finite;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Matrix& m, bool) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

// ---------------------------------------------------------------- kernels

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

// Row-wise layer norm; stores the normalized rows and 1/std for backward.
Matrix layer_norm(const Matrix& x, const Matrix& scale, const Matrix& shift, double eps,
                  Matrix& hat, Eigen::VectorXd& inv_std) {
  const auto d = static_cast<double>(x.cols());
  hat.resize(x.rows(), x.cols());
  inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / d;
    const auto centered = (x.row(r).array() - mean).matrix();
    const double var = centered.squaredNorm() / d;
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    hat.row(r) = centered * inv_std[r];
  }
  Matrix y = hat.array().rowwise() * scale.row(0).array();
  y.array().rowwise() += shift.row(0).array();
  return y;
}

// Gradient through normalization given dL/dhat.
Matrix layer_norm_backward(const Matrix& dhat, const Matrix& hat, const Eigen::VectorXd& inv_std) {
  const auto d = static_cast<double>(hat.cols());
  Matrix dx(hat.rows(), hat.cols());
  for (Eigen::Index r = 0; r < hat.rows(); ++r) {
    const double mean_d = dhat.row(r).sum() / d;
    const double mean_dh = dhat.row(r).dot(hat.row(r)) / d;
    dx.row(r) = inv_std[r] * (dhat.row(r).array() - mean_d - hat.row(r).array() * mean_dh).matrix();
  }
  return dx;
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Matrix m(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.uniform01() < rate ? 0.0 : keep;
  }
  return m;
}

void require_finite(const Matrix& m, const std::string& where) {
  if (!m.allFinite()) throw NumericError("non-finite activation in " + where);
}

}  // namespace

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

// ---------------------------------------------------------------- forward

ForwardResult forward(std::span<const TokenSequence> batch, const ModelParams& params,
                      const ModelConfig& config, Mode mode, Rng* dropout_rng) {
  params.check_shapes(config);
  const bool train = mode == Mode::kTrain;
  const bool use_dropout = train && config.dropout > 0.0;
  if (use_dropout && dropout_rng == nullptr) {
    throw InvalidArgument("train-mode forward with dropout needs a generator");
  }
  const auto d = static_cast<Eigen::Index>(config.hidden);
  const auto heads = static_cast<Eigen::Index>(config.heads);
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  ForwardResult result;
  result.mode = mode;
  result.logits.resize(static_cast<Eigen::Index>(batch.size()), 3);
  if (train) result.caches.resize(batch.size());

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const TokenSequence& seq = batch[b];
    if (seq.type_ids.size() != seq.ids.size() || seq.attention_mask.size() != seq.ids.size()) {
      throw ShapeError(fmt::format("sequence {}: list lengths differ", b));
    }
    if (seq.ids.size() > config.max_positions) {
      throw ShapeError(fmt::format("sequence {}: length {} exceeds max_positions {}", b,
                                   seq.ids.size(), config.max_positions));
    }
    if (seq.ids.empty() || seq.attention_mask[0] != 1) {
      throw ShapeError(fmt::format("sequence {}: position 0 must be attended", b));
    }
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < seq.ids.size(); ++i) {
      if (seq.attention_mask[i] == 1) positions.push_back(i);
    }
    const auto T = static_cast<Eigen::Index>(positions.size());

    Matrix x(T, d);
    for (Eigen::Index t = 0; t < T; ++t) {
      const std::size_t p = positions[static_cast<std::size_t>(t)];
      const TokenId id = seq.ids[p];
      const int type = seq.type_ids[p];
      if (id < 0 || static_cast<std::size_t>(id) >= config.vocab_size) {
        throw ShapeError(fmt::format("sequence {}: token id {} out of range", b, id));
      }
      if (type != 0 && type != 1) {
        throw ShapeError(fmt::format("sequence {}: type id {} out of range", b, type));
      }
      x.row(t) = params.token_embedding.row(id) +
                 params.position_embedding.row(static_cast<Eigen::Index>(p)) +
                 params.type_embedding.row(type);
    }
    SequenceCache* cache = train ? &result.caches[b] : nullptr;
    if (use_dropout) {
      Matrix m = dropout_mask(T, d, config.dropout, *dropout_rng);
      x.array() *= m.array();
      cache->embed_dropout = std::move(m);
    }
    require_finite(x, "embeddings");

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      const LayerParams& L = params.layers[l];
      LayerCache lc;
      Matrix q = x * L.attn_q;
      Matrix k = x * L.attn_k;
      Matrix v = x * L.attn_v;
      Matrix context(T, d);
      if (train) lc.probs.resize(static_cast<std::size_t>(heads));
      for (Eigen::Index h = 0; h < heads; ++h) {
        Matrix scores = q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose() * scale;
        Matrix probs = softmax_rows(scores);
        context.middleCols(h * dh, dh) = probs * v.middleCols(h * dh, dh);
        if (train) lc.probs[static_cast<std::size_t>(h)] = std::move(probs);
      }
      Matrix attn = context * L.attn_o;
      if (use_dropout) {
        lc.attn_dropout = dropout_mask(T, d, config.dropout, *dropout_rng);
        attn.array() *= lc.attn_dropout.array();
      }
      require_finite(attn, fmt::format("layer {} attention", l));
      Matrix h1 = layer_norm(x + attn, L.ln1_scale, L.ln1_shift, config.layer_norm_eps,
                             lc.ln1_hat, lc.ln1_inv_std);

      Matrix ff_pre = h1 * L.ff_in;
      Matrix ff_act = ff_pre.unaryExpr(&gelu);
      Matrix ff = ff_act * L.ff_out;
      if (use_dropout) {
        lc.ff_dropout = dropout_mask(T, d, config.dropout, *dropout_rng);
        ff.array() *= lc.ff_dropout.array();
      }
      require_finite(ff, fmt::format("layer {} feed-forward", l));
      Matrix out = layer_norm(h1 + ff, L.ln2_scale, L.ln2_shift, config.layer_norm_eps,
                              lc.ln2_hat, lc.ln2_inv_std);
      require_finite(out, fmt::format("layer {} output", l));

      if (train) {
        lc.input = std::move(x);
        lc.q = std::move(q);
        lc.k = std::move(k);
        lc.v = std::move(v);
        lc.context = std::move(context);
        lc.ln1_out = std::move(h1);
        lc.ff_pre = std::move(ff_pre);
        lc.ff_act = std::move(ff_act);
        cache->layers.push_back(std::move(lc));
      }
      x = std::move(out);
    }

    result.logits.row(static_cast<Eigen::Index>(b)) =
        x.row(0) * params.head_weight + params.head_bias;
    if (train) {
      cache->positions = std::move(positions);
      cache->ids = seq.ids;
      cache->type_ids = seq.type_ids;
      cache->final_hidden = std::move(x);
    }
  }
  require_finite(result.logits, "classifier head");
  return result;
}

double cross_entropy(const Matrix& logits, std::span<const InfoLabel> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size() || logits.cols() != 3) {
    throw ShapeError("logits and labels disagree in shape");
  }
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
    total += lse - logits(r, static_cast<Eigen::Index>(index(labels[static_cast<std::size_t>(r)])));
  }
  return total / static_cast<double>(labels.size());
}

// ---------------------------------------------------------------- backward

ModelParams backward(const ForwardResult& state, std::span<const InfoLabel> labels,
                     const ModelParams& params, const ModelConfig& config) {
  if (state.mode != Mode::kTrain) throw InvalidArgument("backward needs a train-mode forward");
  if (state.caches.size() != labels.size()) throw ShapeError("labels and batch differ in size");
  const auto d = static_cast<Eigen::Index>(config.hidden);
  const auto heads = static_cast<Eigen::Index>(config.heads);
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double inv_batch = labels.empty() ? 0.0 : 1.0 / static_cast<double>(labels.size());

  ModelParams grads = ModelParams::zeros(config);
  const Matrix probs = softmax_rows(state.logits);

  for (std::size_t b = 0; b < state.caches.size(); ++b) {
    const SequenceCache& cache = state.caches[b];
    Matrix dlogit = probs.row(static_cast<Eigen::Index>(b));
    dlogit(0, static_cast<Eigen::Index>(index(labels[b]))) -= 1.0;
    dlogit *= inv_batch;

    grads.head_weight += cache.final_hidden.row(0).transpose() * dlogit;
    grads.head_bias += dlogit;

    const Eigen::Index T = cache.final_hidden.rows();
    Matrix dx = Matrix::Zero(T, d);
    dx.row(0) = dlogit * params.head_weight.transpose();

    for (std::size_t li = params.layers.size(); li-- > 0;) {
      const LayerParams& L = params.layers[li];
      const LayerCache& lc = cache.layers[li];
      LayerParams& G = grads.layers[li];

      // Second add & norm.
      G.ln2_scale += (dx.array() * lc.ln2_hat.array()).colwise().sum().matrix();
      G.ln2_shift += dx.colwise().sum();
      Matrix dhat2 = dx.array().rowwise() * L.ln2_scale.row(0).array();
      Matrix dres2 = layer_norm_backward(dhat2, lc.ln2_hat, lc.ln2_inv_std);

      // Feed-forward.
      Matrix dff = dres2;
      if (lc.ff_dropout.size() != 0) dff.array() *= lc.ff_dropout.array();
      G.ff_out += lc.ff_act.transpose() * dff;
      Matrix dact = dff * L.ff_out.transpose();
      Matrix dpre = dact.array() * lc.ff_pre.unaryExpr(&gelu_grad).array();
      G.ff_in += lc.ln1_out.transpose() * dpre;
      Matrix dh1 = dres2 + dpre * L.ff_in.transpose();

      // First add & norm.
      G.ln1_scale += (dh1.array() * lc.ln1_hat.array()).colwise().sum().matrix();
      G.ln1_shift += dh1.colwise().sum();
      Matrix dhat1 = dh1.array().rowwise() * L.ln1_scale.row(0).array();
      Matrix dres1 = layer_norm_backward(dhat1, lc.ln1_hat, lc.ln1_inv_std);

      // Attention.
      Matrix dattn = dres1;
      if (lc.attn_dropout.size() != 0) dattn.array() *= lc.attn_dropout.array();
      G.attn_o += lc.context.transpose() * dattn;
      Matrix dcontext = dattn * L.attn_o.transpose();
      Matrix dq(T, d), dk(T, d), dv(T, d);
      for (Eigen::Index h = 0; h < heads; ++h) {
        const Matrix& p = lc.probs[static_cast<std::size_t>(h)];
        const auto dc = dcontext.middleCols(h * dh, dh);
        Matrix dp = dc * lc.v.middleCols(h * dh, dh).transpose();
        dv.middleCols(h * dh, dh) = p.transpose() * dc;
        const Eigen::VectorXd row_dot = (dp.array() * p.array()).rowwise().sum();
        Matrix ds = p.array() * (dp.array().colwise() - row_dot.array());
        ds *= scale;
        dq.middleCols(h * dh, dh) = ds * lc.k.middleCols(h * dh, dh);
        dk.middleCols(h * dh, dh) = ds.transpose() * lc.q.middleCols(h * dh, dh);
      }
      G.attn_q += lc.input.transpose() * dq;
      G.attn_k += lc.input.transpose() * dk;
      G.attn_v += lc.input.transpose() * dv;
      dx = dres1 + dq * L.attn_q.transpose() + dk * L.attn_k.transpose() +
           dv * L.attn_v.transpose();
    }

    if (cache.embed_dropout.size() != 0) dx.array() *= cache.embed_dropout.array();
    for (Eigen::Index t = 0; t < T; ++t) {
      const std::size_t p = cache.positions[static_cast<std::size_t>(t)];
      grads.token_embedding.row(cache.ids[p]) += dx.row(t);
      grads.position_embedding.row(static_cast<Eigen::Index>(p)) += dx.row(t);
      grads.type_embedding.row(cache.type_ids[p]) += dx.row(t);
    }
  }
  return grads;
}

// ---------------------------------------------------------------- predict

Prediction prediction_from_logits(std::span<const double> logits) {
  Prediction pred{};
  const double mx = std::max({logits[0], logits[1], logits[2]});
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    pred.probs[c] = std::exp(logits[c] - mx);
    sum += pred.probs[c];
  }
  std::size_t best = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    pred.probs[c] /= sum;
    if (logits[c] > logits[best]) best = c;
  }
  pred.label = kInfoLabels[best];
  return pred;
}

std::vector<Prediction> predict(std::span<const TokenSequence> batch, const ModelParams& params,
                                const ModelConfig& config) {
  const ForwardResult out = forward(batch, params, config, Mode::kEval);
  std::vector<Prediction> preds;
  preds.reserve(batch.size());
  for (Eigen::Index r = 0; r < out.logits.rows(); ++r) {
    const double row[3] = {out.logits(r, 0), out.logits(r, 1), out.logits(r, 2)};
    preds.push_back(prediction_from_logits(row));
  }
  return preds;
}

}  // namespace mistriage
