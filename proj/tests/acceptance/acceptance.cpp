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

// Acceptance suite. Prints one PASS/FAIL line per criterion; the exit code
// is the number of failures. `--only N` runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mistriage/corpus.hpp"
#include "mistriage/hashing.hpp"
#include "mistriage/model.hpp"
#include "mistriage/stats.hpp"
#include "mistriage/train.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace {

using namespace mistriage;
namespace fs = std::filesystem;

constexpr double kMetricTol = 0.001;
constexpr double kWeightedTol = 0.002;
constexpr double kPctTol = 0.05;
constexpr double kCiTol = 0.005;
constexpr int kCiSeeds = 10;
constexpr int kCiSeedsRequired = 9;
constexpr std::int64_t kSplitTol = 1;
constexpr double kGradTol = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr double kGradFloor = 1e-8;
constexpr int kFuzzCases = 1000;
constexpr double kExactTol = 1e-12;
constexpr double kPairAccuracyFloor = 0.90;
constexpr std::size_t kAblationExamples = 1500;
constexpr std::array<std::uint64_t, 3> kAblationSeeds = {11, 22, 33};

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("MISS " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol + 1e-12; }

ConfusionMatrix published_matrix() {
  ConfusionMatrix cm;
  const auto g = oracle::published_confusion();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cm.counts[r][c] = g[r][c];
  return cm;
}

// ---------------------------------------------------------------- 1

Outcome metric_arithmetic() {
  Outcome o;
  const ClassMetrics m = class_metrics(published_matrix());
  const double expect[3][3] = {{0.714, 0.671, 0.692}, {0.803, 0.833, 0.818}, {0.693, 0.656, 0.674}};
  const char* names[3] = {"Mis", "PT", "True"};
  for (int c = 0; c < 3; ++c) {
    const auto& pc = m.per_class[c];
    o.check(near(pc.precision, expect[c][0], kMetricTol), fmt::format("{} P {:.4f}", names[c], pc.precision));
    o.check(near(pc.recall, expect[c][1], kMetricTol), fmt::format("{} R {:.4f}", names[c], pc.recall));
    o.check(near(pc.f1, expect[c][2], kMetricTol), fmt::format("{} F1 {:.4f}", names[c], pc.f1));
  }
  o.check(near(m.accuracy, 0.7660, kMetricTol), fmt::format("accuracy {:.4f}", m.accuracy));
  o.check(near(m.macro_f1, 0.7277, kMetricTol), fmt::format("macro F1 {:.4f}", m.macro_f1));
  o.check(near(m.weighted_f1, 0.763, kWeightedTol), fmt::format("weighted F1 {:.4f}", m.weighted_f1));
  o.note(fmt::format("acc {:.4f} macroF1 {:.4f} weightedF1 {:.4f}", m.accuracy, m.macro_f1,
                     m.weighted_f1));
  return o;
}

// ---------------------------------------------------------------- 2

Outcome error_ranking() {
  Outcome o;
  const ErrorBreakdown b = error_breakdown(published_matrix());
  const std::vector<std::int64_t> counts = {95, 78, 77, 62, 8, 6};
  const std::vector<double> pcts = {29.1, 23.9, 23.6, 19.0, 2.5, 1.8};
  o.check(b.total_errors == 326, fmt::format("total {}", b.total_errors));
  o.check(b.cells.size() == counts.size(), fmt::format("{} cells", b.cells.size()));
  for (std::size_t i = 0; i < std::min(counts.size(), b.cells.size()); ++i) {
    o.check(b.cells[i].count == counts[i], fmt::format("rank {} count {}", i + 1, b.cells[i].count));
    o.check(near(b.cells[i].pct_of_errors, pcts[i], kPctTol),
            fmt::format("rank {} pct {:.3f}", i + 1, b.cells[i].pct_of_errors));
  }
  o.note(fmt::format("total {} top {:.2f}%", b.total_errors,
                     b.cells.empty() ? 0.0 : b.cells[0].pct_of_errors));
  return o;
}

// ---------------------------------------------------------------- 3

Outcome coupling_crosstab() {
  Outcome o;
  const CrossTab t = crosstab(synthetic::clean_corpus_with_counts(synthetic::published_crosstab()));
  const double geq[3] = {55.9, 21.8, 1.0};
  const double high[3] = {18.1, 1.3, 0.0};
  for (std::size_t r = 0; r < 3; ++r) {
    o.check(near(t.geq_med_pct(r), geq[r], kPctTol), fmt::format("row {} >=Med {:.3f}", r, t.geq_med_pct(r)));
    o.check(near(t.high_pct(r), high[r], kPctTol), fmt::format("row {} High {:.3f}", r, t.high_pct(r)));
  }
  o.check(t.col_total(0) == 6839 && t.col_total(1) == 1938 && t.col_total(2) == 447,
          fmt::format("totals {}/{}/{}", t.col_total(0), t.col_total(1), t.col_total(2)));
  o.note(fmt::format(">=Med {:.2f}/{:.2f}/{:.2f} High {:.2f}/{:.2f}/{:.2f}", t.geq_med_pct(0),
                     t.geq_med_pct(1), t.geq_med_pct(2), t.high_pct(0), t.high_pct(1),
                     t.high_pct(2)));
  return o;
}

// ---------------------------------------------------------------- 4

Outcome bootstrap_interval() {
  Outcome o;
  const auto pairs = expand(published_matrix());
  int inside = 0;
  std::string bounds;
  for (int s = 1; s <= kCiSeeds; ++s) {
    const BootstrapCI ci = bootstrap_ci(pairs, Metric::kMacroF1, 5000, 0.05, static_cast<std::uint64_t>(s));
    const bool ok = near(ci.lower, 0.7005, kCiTol) && near(ci.upper, 0.7532, kCiTol);
    inside += ok ? 1 : 0;
    if (s <= 3) bounds += fmt::format(" [{:.4f},{:.4f}]", ci.lower, ci.upper);
  }
  o.check(inside >= kCiSeedsRequired, fmt::format("{}/{} seeds inside", inside, kCiSeeds));
  o.note(fmt::format("{}/{} seeds within 0.5pp;{}", inside, kCiSeeds, bounds));
  return o;
}

// ---------------------------------------------------------------- 5

Outcome split_fidelity() {
  Outcome o;
  const CleanCorpus corpus = synthetic::corpus_with_class_counts(2082, 5535, 1607);
  const Splits s = stratified_split(corpus, SplitSpec{{0.70, 0.15, 0.15}, 0});
  std::set<std::size_t> all;
  all.insert(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  o.check(all.size() == corpus.size() && s.train.size() + s.val.size() + s.test.size() == corpus.size(),
          "disjoint and exhaustive");
  const auto test = class_counts(corpus, s.test);
  const std::int64_t expect[3] = {313, 839, 241};
  for (int c = 0; c < 3; ++c) {
    o.check(std::abs(static_cast<std::int64_t>(test[c]) - expect[c]) <= kSplitTol,
            fmt::format("test class {} = {} (want {} +-1)", c, test[c], expect[c]));
  }
  o.note(fmt::format("test {}/{}/{}", test[0], test[1], test[2]));
  return o;
}

// ---------------------------------------------------------------- 6

std::vector<TokenSequence> random_batch(Rng& rng, std::size_t batch, std::size_t max_len,
                                        std::size_t vocab) {
  std::vector<TokenSequence> out;
  for (std::size_t b = 0; b < batch; ++b) {
    TokenSequence s;
    const std::size_t len = 2 + rng.uniform_index(max_len - 1);
    const std::size_t split = 1 + rng.uniform_index(len);
    for (std::size_t i = 0; i < max_len; ++i) {
      const bool real = i < len;
      s.ids.push_back(i == 0 ? kClsId
                             : static_cast<TokenId>(real ? rng.uniform_index(vocab) : kPadId));
      s.type_ids.push_back(real && i >= split ? 1 : 0);
      s.attention_mask.push_back(real ? 1 : 0);
    }
    s.label = kInfoLabels[rng.uniform_index(3)];
    out.push_back(std::move(s));
  }
  return out;
}

Outcome model_numerics() {
  Outcome o;
  ModelConfig cfg;
  cfg.layers = 1;
  cfg.heads = 1;
  cfg.hidden = 4;
  cfg.ff_dim = 8;
  cfg.vocab_size = 12;
  cfg.max_positions = 8;
  cfg.dropout = 0.0;
  cfg.init_std = 0.5;
  ModelParams params = ModelParams::init(cfg, 7);
  Rng rng(99);
  const auto batch = random_batch(rng, 4, cfg.max_positions, cfg.vocab_size);
  std::vector<InfoLabel> labels;
  for (const auto& s : batch) labels.push_back(*s.label);

  const ForwardResult fwd = forward(batch, params, cfg, Mode::kTrain, nullptr);
  const ModelParams grads = backward(fwd, labels, params, cfg);
  std::vector<const Matrix*> analytic;
  grads.visit([&](const std::string&, const Matrix& g, bool) { analytic.push_back(&g); });
  auto loss = [&] { return cross_entropy(forward(batch, params, cfg, Mode::kEval).logits, labels); };
  double worst = 0.0;
  std::string worst_name;
  std::size_t idx = 0;
  params.visit([&](const std::string& name, Matrix& p, bool) {
    const Matrix numeric = oracle::numeric_gradient(loss, p, kGradStep);
    const double err = oracle::max_relative_error(*analytic[idx++], numeric, kGradFloor);
    if (err > worst) {
      worst = err;
      worst_name = name;
    }
  });
  o.check(worst < kGradTol, fmt::format("gradient rel err {:.2e} in {}", worst, worst_name));
  o.note(fmt::format("max grad rel err {:.2e} ({})", worst, worst_name));

  // Mask invariance: rewriting padded positions, or adding padding, leaves
  // the logits untouched.
  std::size_t mask_failures = 0, softmax_failures = 0;
  for (int t = 0; t < kFuzzCases; ++t) {
    ModelConfig c = cfg;
    c.layers = 1 + rng.uniform_index(2);
    c.heads = 1 + rng.uniform_index(2);
    c.hidden = 4 * c.heads;
    c.max_positions = 16;
    const ModelParams p = ModelParams::init(c, 1000 + t);
    const std::size_t len = 8;
    auto seqs = random_batch(rng, 2, len, c.vocab_size);
    const Matrix base = forward(seqs, p, c, Mode::kEval).logits;

    auto scrambled = seqs;
    auto padded = seqs;
    for (std::size_t b = 0; b < seqs.size(); ++b) {
      for (std::size_t i = 0; i < len; ++i) {
        if (scrambled[b].attention_mask[i] == 0) {
          scrambled[b].ids[i] = static_cast<TokenId>(rng.uniform_index(c.vocab_size));
          scrambled[b].type_ids[i] = static_cast<int>(rng.uniform_index(2));
        }
      }
      const std::size_t extra = 1 + rng.uniform_index(c.max_positions - len);
      padded[b].ids.resize(len + extra, kPadId);
      padded[b].type_ids.resize(len + extra, 0);
      padded[b].attention_mask.resize(len + extra, 0);
    }
    const double d1 = (forward(scrambled, p, c, Mode::kEval).logits - base).cwiseAbs().maxCoeff();
    double d2 = 0.0;
    for (std::size_t b = 0; b < seqs.size(); ++b) {
      const Matrix one = forward(std::span(&padded[b], 1), p, c, Mode::kEval).logits;
      d2 = std::max(d2, (one.row(0) - base.row(static_cast<Eigen::Index>(b))).cwiseAbs().maxCoeff());
    }
    if (d1 > kExactTol || d2 > kExactTol) ++mask_failures;

    Matrix logits = base;
    if (t % 2 == 1) {
      for (Eigen::Index i = 0; i < logits.size(); ++i) {
        logits.data()[i] = (rng.uniform01() - 0.5) * std::pow(10.0, static_cast<double>(t % 7));
      }
    }
    const Matrix probs = softmax_rows(logits);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      const double sum = probs.row(r).sum();
      if (!(std::abs(sum - 1.0) <= kExactTol) || probs.row(r).minCoeff() < 0.0 ||
          !probs.row(r).allFinite()) {
        ++softmax_failures;
      }
    }
  }
  o.check(mask_failures == 0, fmt::format("{} mask-invariance failures", mask_failures));
  o.check(softmax_failures == 0, fmt::format("{} softmax failures", softmax_failures));
  o.note(fmt::format("{} fuzzed cases, mask fails {}, softmax fails {}", kFuzzCases,
                     mask_failures, softmax_failures));
  return o;
}

// ---------------------------------------------------------------- 7

struct ArmScore {
  double accuracy = 0.0;
  double mis_recall = 0.0;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Outcome encoding_ablation() {
  Outcome o;
  ModelConfig model;
  model.layers = 2;
  model.heads = 4;
  model.hidden = 32;
  model.ff_dim = 64;
  model.dropout = 0.1;
  TrainConfig train;
  // The task sits on a plateau for tens of epochs before attention learns to
  // pair the two topic tokens, so the budget is larger than the defaults.
  train.base_lr = 1e-3;
  train.max_epochs = 60;
  train.patience = 20;
  train.batch_size = 16;

  std::vector<double> pair_acc, pair_recall, single_recall;
  std::string detail;
  for (std::uint64_t seed : kAblationSeeds) {
    const auto task = synthetic::contradiction_task(kAblationExamples, derive_seed(seed, "task"));
    const CleanCorpus corpus = CleanCorpus::from_records(task.records);
    const Splits splits = stratified_split(corpus, SplitSpec{{0.70, 0.15, 0.15}, seed});
    ModelConfig m = model;
    m.vocab_size = task.vocab.size();
    m.max_positions = task.max_len;
    TrainConfig t = train;
    t.seed = seed;
    ArmScore score[2];
    for (EncodingArm arm : {EncodingArm::kPair, EncodingArm::kSingle}) {
      const TrainResult r = mistriage::train(corpus, splits, task.vocab, m, t, arm);
      const auto test = encode_subset(corpus, splits.test, task.vocab, m.max_positions, arm);
      const auto pred = predict_labels(test, r.params, m);
      std::vector<LabelPair> pairs;
      for (std::size_t i = 0; i < test.size(); ++i) pairs.emplace_back(*test[i].label, pred[i]);
      const ClassMetrics cm = class_metrics(confusion(pairs));
      score[arm == EncodingArm::kPair ? 0 : 1] = {cm.accuracy, cm.per_class[0].recall};
    }
    pair_acc.push_back(score[0].accuracy);
    pair_recall.push_back(score[0].mis_recall);
    single_recall.push_back(score[1].mis_recall);
    detail += fmt::format(" seed{}: pair acc {:.3f} recall {:.3f} / single acc {:.3f} recall {:.3f};",
                          seed, score[0].accuracy, score[0].mis_recall, score[1].accuracy,
                          score[1].mis_recall);
  }
  const double acc = median(pair_acc);
  const double pr = median(pair_recall);
  const double sr = median(single_recall);
  o.check(acc >= kPairAccuracyFloor, fmt::format("median pair accuracy {:.3f}", acc));
  o.check(pr >= sr, fmt::format("median Mis recall pair {:.3f} < single {:.3f}", pr, sr));
  o.note(fmt::format("median pair acc {:.3f}, Mis recall pair {:.3f} vs single {:.3f};{}", acc,
                     pr, sr, detail));
  return o;
}

// ---------------------------------------------------------------- 8

int run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = fmt::format("cd '{}' && '{}' --quiet --config config.json {} 2>/dev/null",
                                      dir.string(), MISTRIAGE_CLI_PATH, args);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path prepared_run(const std::string& tag) {
  const fs::path dir = synthetic::temp_dir(tag);
  const auto task = synthetic::contradiction_task(240, 5);
  write_file(dir / "raw.csv", synthetic::to_csv(task.records));
  write_file(dir / "config.json", R"({
  "seed": 17,
  "paths": {"corpus": "raw.csv", "out": "out"},
  "tokenizer": {"target_size": 60},
  "encoding": {"arm": "pair", "max_len": 24},
  "model": {"layers": 1, "heads": 2, "hidden": 16, "ff_dim": 32},
  "train": {"max_epochs": 3, "base_lr": 0.001},
  "eval": {"bootstrap_iterations": 500}
})");
  return dir;
}

Outcome determinism_provenance() {
  Outcome o;
  std::vector<fs::path> dirs;
  for (const char* tag : {"accept-a", "accept-b"}) {
    const fs::path dir = prepared_run(tag);
    for (const char* verb : {"ingest", "split", "tokenizer-train", "train", "eval"}) {
      const int rc = run_cli(dir, verb);
      o.check(rc == 0, fmt::format("{} exited {} in {}", verb, rc, tag));
    }
    dirs.push_back(dir);
  }
  std::size_t compared = 0;
  for (const char* name : {"out/eval_report.json", "out/figures/confusion.svg",
                           "out/figures/per_class_f1.svg", "out/history.jsonl", "out/model.ckpt"}) {
    const bool same = fs::exists(dirs[0] / name) && fs::exists(dirs[1] / name) &&
                      read_file(dirs[0] / name) == read_file(dirs[1] / name);
    o.check(same, fmt::format("{} differs between runs", name));
    ++compared;
  }

  // Alter the cleaned corpus after training: eval must refuse.
  const fs::path corpus = dirs[0] / "out" / "corpus.clean.csv";
  std::string text = read_file(corpus);
  text += "extra title,https://synthetic.example/extra,synthetic,2021-06-01,,True,Low\n";
  write_file(corpus, text);
  const int rc = run_cli(dirs[0], "eval");
  o.check(rc != 0, fmt::format("eval after tampering exited {}", rc));
  o.note(fmt::format("{} artifacts byte-identical; tampered eval exit {}", compared, rc));
  for (const auto& d : dirs) fs::remove_all(d);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--only") only = std::atoi(argv[i + 1]);
  }
  const std::vector<Criterion> criteria = {
      {1, "per-class metric arithmetic", metric_arithmetic},
      {2, "error breakdown ranking", error_ranking},
      {3, "information type x harm cross-tab", coupling_crosstab},
      {4, "bootstrap macro-F1 interval", bootstrap_interval},
      {5, "stratified split fidelity", split_fidelity},
      {6, "model numerical correctness", model_numerics},
      {7, "pair vs single encoding ablation", encoding_ablation},
      {8, "determinism and lineage", determinism_provenance},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream notes;
    for (std::size_t i = 0; i < out.notes.size(); ++i) notes << (i ? "; " : "") << out.notes[i];
    std::cout << fmt::format("{} criterion {}: {} ({:.2f}s) {}\n", out.pass ? "PASS" : "FAIL",
                             c.id, c.name, secs, notes.str());
    failures += out.pass ? 0 : 1;
  }
  return failures;
}
