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

#include "mistriage/pipeline.hpp"

#include <fmt/format.h>

#include "mistriage/checkpoint.hpp"
#include "mistriage/error.hpp"
#include "mistriage/figures.hpp"
#include "mistriage/hashing.hpp"
#include "mistriage/report.hpp"

namespace mistriage::pipeline {
namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVocabProvenanceKey = "provenance";

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

Json provenance(const Context& ctx, const Json& inputs) {
  return {{"tool", "mistriage"},
          {"config_hash", ctx.config.hash()},
          {"seed", ctx.config.seed},
          {"config", ctx.config.resolved()},
          {"inputs", inputs}};
}

Json hash_inputs(const Context& ctx, std::initializer_list<const char*> names) {
  Json in = Json::object();
  for (const char* name : names) in[name] = sha256_file(ctx.path(name));
  return in;
}

void require(const Context& ctx, const char* name, const char* producer) {
  if (!fs::exists(ctx.path(name))) {
    throw IoError(fmt::format("missing upstream artifact {} (run `{}` first)", name, producer));
  }
}

// Every recorded input must still hash to the recorded value.
void check_lineage(const Context& ctx, const Json& inputs, const std::string& consumer) {
  for (const auto& [name, sha] : inputs.items()) {
    const fs::path p = ctx.path(name);
    if (!fs::exists(p)) {
      throw LineageError(fmt::format("{} was built from {}, which no longer exists", consumer, name));
    }
    if (sha256_file(p) != sha.get<std::string>()) {
      throw LineageError(
          fmt::format("{} was built from a different {} (hash mismatch)", consumer, name));
    }
  }
}

Json read_json(const fs::path& p) {
  try {
    return Json::parse(read_file(p));
  } catch (const Json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", p.filename().string(), e.what()));
  }
}

Splits load_splits(const Context& ctx) {
  require(ctx, artifact::kSplits, "split");
  const Json j = read_json(ctx.path(artifact::kSplits));
  check_lineage(ctx, j.at("provenance").at("inputs"), artifact::kSplits);
  return splits_from_json(j);
}

Vocab load_vocab(const Context& ctx) {
  require(ctx, artifact::kVocab, "tokenizer-train");
  Vocab vocab = Vocab::parse(read_file(ctx.path(artifact::kVocab)));
  const auto it = vocab.metadata.find(kVocabProvenanceKey);
  if (it == vocab.metadata.end()) throw LineageError("vocab.txt carries no provenance");
  check_lineage(ctx, Json::parse(it->second).at("inputs"), artifact::kVocab);
  return vocab;
}

CleanCorpus load_corpus(const Context& ctx) {
  require(ctx, artifact::kCleanCorpus, "ingest");
  return load_clean_corpus(ctx.path(artifact::kCleanCorpus));
}

Json history_summary(const TrainHistory& h) {
  return {{"epochs_run", h.epochs.size()},
          {"best_epoch", h.best_epoch},
          {"total_steps", h.total_steps},
          {"stopped_early", h.stopped_early}};
}

struct Trained {
  ModelConfig config;
  TrainResult result;
};

Trained train_arm(const Context& ctx, const CleanCorpus& corpus, const Splits& splits,
                  const Vocab& vocab, EncodingArm arm) {
  const ModelConfig model_cfg = ctx.config.model_config(vocab.size());
  const TrainConfig train_cfg = ctx.config.train_config();
  ctx.info(fmt::format("training {} arm: {} train / {} val records, {} parameters",
                       to_string(arm), splits.train.size(), splits.val.size(),
                       ModelParams::zeros(model_cfg).parameter_count()));
  TrainResult result = mistriage::train(corpus, splits, vocab, model_cfg, train_cfg, arm,
                                        [&](const EpochRecord& e) {
                                          ctx.info(fmt::format(
                                              "epoch {:>2}  loss {:.4f}  val acc {:.4f}  "
                                              "val macro-F1 {:.4f}",
                                              e.epoch, e.train_loss, e.val_accuracy,
                                              e.val_macro_f1));
                                        });
  return {model_cfg, std::move(result)};
}

EvalReport evaluate_arm(const Context& ctx, const CleanCorpus& corpus, const Splits& splits,
                        const Vocab& vocab, const ModelConfig& cfg, const ModelParams& params,
                        EncodingArm arm) {
  const auto test = encode_subset(corpus, splits.test, vocab, cfg.max_positions, arm);
  const std::vector<InfoLabel> predicted = predict_labels(test, params, cfg);
  std::vector<InfoLabel> truth;
  std::vector<HarmLabel> harm;
  for (std::size_t i : splits.test) {
    truth.push_back(corpus.info(i));
    harm.push_back(corpus.harm(i));
  }
  return evaluate(predicted, truth, harm, ctx.config.eval_options());
}

void write_figure(const Context& ctx, const std::string& name, const std::string& svg,
                  std::vector<std::string>& written) {
  if (!ctx.config.figures) return;
  write_file(ctx.path(name), svg);
  written.push_back(name);
}

void write_table(const Context& ctx, const std::string& name, const std::string& tsv,
                 std::vector<std::string>& written) {
  write_file(ctx.path(name), tsv);
  written.push_back(name);
}

Json arm_json(const Context& ctx, const ArmResult& arm) {
  Json cfg = ctx.config.resolved();
  cfg["encoding"]["arm"] = std::string(to_string(arm.arm));
  return {{"arm", std::string(to_string(arm.arm))},
          {"seed", ctx.config.seed},
          {"config", cfg},
          {"history", history_summary(arm.history)},
          {"report", arm.report.to_json()}};
}

}  // namespace

// ---------------------------------------------------------------- context

Context Context::from_config(RunConfig config) {
  Context ctx;
  ctx.out = config.out_dir;
  ctx.config = std::move(config);
  return ctx;
}

void Context::info(const std::string& message) const {
  if (log) log(message);
}

// ---------------------------------------------------------------- shared I/O

CleanCorpus load_clean_corpus(const fs::path& path) {
  ParseResult parsed = read_records(path.string());
  if (!parsed.errors.empty()) {
    throw ParseError(fmt::format("{} row {}: {}", path.filename().string(),
                                 parsed.errors.front().row, parsed.errors.front().reason));
  }
  return CleanCorpus::from_records(std::move(parsed.records));
}

Json splits_to_json(const Splits& s) {
  return {{"train", s.train}, {"val", s.val}, {"test", s.test}};
}

Splits splits_from_json(const Json& j) {
  Splits s;
  s.train = j.at("train").get<std::vector<std::size_t>>();
  s.val = j.at("val").get<std::vector<std::size_t>>();
  s.test = j.at("test").get<std::vector<std::size_t>>();
  return s;
}

// ---------------------------------------------------------------- stages

IngestResult ingest(const Context& ctx, const fs::path& input) {
  if (!fs::exists(input)) throw IoError("cannot read " + input.string());
  ParseResult parsed = read_records(input.string());
  for (const auto& e : parsed.errors) ctx.info(fmt::format("row {}: {}", e.row, e.reason));

  CleanResult cleaned = clean_corpus(std::move(parsed.records));
  IngestResult result;
  result.stats = cleaned.stats;
  result.row_errors = parsed.errors;
  for (std::size_t i = 0; i < cleaned.corpus.size(); ++i) {
    ++result.class_counts[index(cleaned.corpus.info(i))];
  }

  write_file(ctx.path(artifact::kCleanCorpus), write_corpus_csv(cleaned.corpus.records()));

  Json errors = Json::array();
  for (const auto& e : parsed.errors) errors.push_back({{"row", e.row}, {"reason", e.reason}});
  Json in = Json::object();
  in[input.filename().string()] = sha256_file(input);
  Json stats = {{"schema_version", kArtifactSchemaVersion},
                {"stats", cleaned.stats.to_json()},
                {"row_errors", errors},
                {"outputs", hash_inputs(ctx, {artifact::kCleanCorpus})},
                {"provenance", provenance(ctx, in)}};
  write_file(ctx.path(artifact::kCleanStats), json_text(stats));
  write_file(ctx.path(artifact::kDistribution), distribution_table(cleaned.corpus));
  ctx.info(fmt::format("ingest: {} input, {} duplicate URLs, {} invalid labels, {} retained",
                       cleaned.stats.input, cleaned.stats.duplicate_urls,
                       cleaned.stats.invalid_labels, cleaned.stats.retained));
  return result;
}

Splits split(const Context& ctx) {
  const CleanCorpus corpus = load_corpus(ctx);
  const Splits splits = stratified_split(corpus, ctx.config.split_spec());

  Json counts = Json::object();
  counts["train"] = class_counts(corpus, splits.train);
  counts["val"] = class_counts(corpus, splits.val);
  counts["test"] = class_counts(corpus, splits.test);
  Json j = splits_to_json(splits);
  j["schema_version"] = kArtifactSchemaVersion;
  j["ratios"] = ctx.config.split_ratios;
  j["class_counts"] = counts;
  j["class_order"] = {"Misinformation", "Partly True", "True"};
  j["provenance"] = provenance(ctx, hash_inputs(ctx, {artifact::kCleanCorpus}));
  write_file(ctx.path(artifact::kSplits), json_text(j));
  ctx.info(fmt::format("split: {} train / {} val / {} test", splits.train.size(),
                       splits.val.size(), splits.test.size()));
  return splits;
}

Vocab tokenizer_train(const Context& ctx) {
  const CleanCorpus corpus = load_corpus(ctx);
  const Splits splits = load_splits(ctx);
  std::vector<std::string> texts;
  for (std::size_t i : splits.train) {
    texts.push_back(corpus[i].title);
    if (corpus[i].description) texts.push_back(*corpus[i].description);
  }
  Vocab vocab = train_vocab(texts, ctx.config.tokenizer);
  vocab.metadata[kVocabProvenanceKey] =
      provenance(ctx, hash_inputs(ctx, {artifact::kCleanCorpus, artifact::kSplits})).dump();
  write_file(ctx.path(artifact::kVocab), vocab.serialize());
  ctx.info(fmt::format("tokenizer: {} tokens", vocab.size()));
  return vocab;
}

TrainHistory train(const Context& ctx) {
  const CleanCorpus corpus = load_corpus(ctx);
  const Splits splits = load_splits(ctx);
  const Vocab vocab = load_vocab(ctx);
  const Json prov = provenance(
      ctx, hash_inputs(ctx, {artifact::kCleanCorpus, artifact::kSplits, artifact::kVocab}));

  Checkpoint ckpt;
  ckpt.metadata = {{"provenance", prov}, {"arm", std::string(to_string(ctx.config.arm))}};
  try {
    Trained t = train_arm(ctx, corpus, splits, vocab, ctx.config.arm);
    ckpt.config = t.config;
    ckpt.params = std::move(t.result.params);
    ckpt.metadata["history"] = history_summary(t.result.history);
    write_file(ctx.path(artifact::kCheckpoint), ckpt.serialize());
    write_file(ctx.path(artifact::kHistory),
               t.result.history.to_jsonl({{"config_hash", ctx.config.hash()},
                                          {"seed", ctx.config.seed},
                                          {"inputs", prov.at("inputs")}}));
    return t.result.history;
  } catch (const TrainingDiverged& e) {
    ckpt.config = ctx.config.model_config(vocab.size());
    ckpt.params = e.last_good();
    ckpt.metadata["diverged"] = e.what();
    write_file(ctx.path(std::string(artifact::kCheckpoint) + ".last_good"), ckpt.serialize());
    throw;
  }
}

EvalReport eval(const Context& ctx) {
  require(ctx, artifact::kCheckpoint, "train");
  const Checkpoint ckpt = Checkpoint::parse(read_file(ctx.path(artifact::kCheckpoint)));
  if (!ckpt.metadata.contains("provenance")) throw LineageError("model.ckpt carries no provenance");
  check_lineage(ctx, ckpt.metadata.at("provenance").at("inputs"), artifact::kCheckpoint);

  const CleanCorpus corpus = load_corpus(ctx);
  const Splits splits = load_splits(ctx);
  const Vocab vocab = load_vocab(ctx);
  if (vocab.size() != ckpt.config.vocab_size) throw LineageError("vocab does not match model.ckpt");
  const EncodingArm arm = parse_encoding_arm(ckpt.metadata.at("arm").get<std::string>());

  EvalReport report = evaluate_arm(ctx, corpus, splits, vocab, ckpt.config, ckpt.params, arm);
  report.provenance = provenance(ctx, hash_inputs(ctx, {artifact::kCleanCorpus, artifact::kSplits,
                                                        artifact::kVocab, artifact::kCheckpoint}));
  report.provenance["arm"] = std::string(to_string(arm));
  write_file(ctx.path(artifact::kEvalReport), json_text(report.to_json()));
  ctx.info(fmt::format("eval: accuracy {:.4f}  macro-F1 {:.4f}  95% CI [{:.4f}, {:.4f}]",
                       report.metrics.accuracy, report.metrics.macro_f1, report.macro_f1_ci.lower,
                       report.macro_f1_ci.upper));
  pipeline::report(ctx);
  return report;
}

AblationResult ablate(const Context& ctx) {
  const CleanCorpus corpus = load_corpus(ctx);
  const Splits splits = load_splits(ctx);
  const Vocab vocab = load_vocab(ctx);

  auto run = [&](EncodingArm arm) {
    Trained t = train_arm(ctx, corpus, splits, vocab, arm);
    EvalReport r = evaluate_arm(ctx, corpus, splits, vocab, t.config, t.result.params, arm);
    return ArmResult{arm, std::move(t.result.history), std::move(r)};
  };
  AblationResult result{run(ctx.config.arm), run(ctx.config.ablate_baseline), {}};
  result.delta = AblationDelta::between(result.pair.report.metrics, result.baseline.report.metrics);

  Json j = {{"schema_version", kArtifactSchemaVersion},
            {"arms", {{"pair", arm_json(ctx, result.pair)},
                      {"baseline", arm_json(ctx, result.baseline)}}},
            {"delta",
             {{"macro_f1", result.delta.macro_f1},
              {"mis_recall", result.delta.mis_recall},
              {"mis_f1", result.delta.mis_f1}}},
            {"provenance",
             provenance(ctx, hash_inputs(ctx, {artifact::kCleanCorpus, artifact::kSplits,
                                               artifact::kVocab}))}};
  write_file(ctx.path(artifact::kAblation), json_text(j));
  ctx.info(fmt::format("ablate: delta macro-F1 {:+.4f}, Misinformation recall {:+.4f}",
                       result.delta.macro_f1, result.delta.mis_recall));
  pipeline::report(ctx);
  return result;
}

CrossTab analyze(const Context& ctx, const fs::path& corpus_path) {
  if (!fs::exists(corpus_path)) throw IoError("cannot read " + corpus_path.string());
  const ParseResult parsed = read_records(corpus_path.string());
  if (!parsed.errors.empty()) {
    throw ParseError(fmt::format("row {}: {}", parsed.errors.front().row,
                                 parsed.errors.front().reason));
  }
  if (parsed.records.empty()) throw EmptyCorpus();
  std::vector<std::pair<InfoLabel, HarmLabel>> rows;
  for (const auto& r : parsed.records) {
    if (!r.harm_level) throw InvalidArgument("record " + r.url + " has no harm level label");
    if (!r.info_type) throw InvalidArgument("record " + r.url + " has no information type label");
    rows.emplace_back(*r.info_type, *r.harm_level);
  }
  const CrossTab tab = crosstab(rows);

  std::vector<std::string> written;
  write_table(ctx, "tables/crosstab.tsv", crosstab_table(tab), written);
  write_table(ctx, "tables/crosstab_proportions.tsv", crosstab_proportions_table(tab), written);
  std::vector<double> totals;
  std::vector<std::string> names;
  for (InfoLabel l : kInfoLabels) {
    names.emplace_back(to_string(l));
    totals.push_back(static_cast<double>(tab.row_total(index(l))));
  }
  write_figure(ctx, "figures/class_distribution.svg",
               svg::bar_chart("Information type distribution", names, totals, "records"), written);
  write_figure(ctx, "figures/crosstab_counts.svg", svg::crosstab_counts(tab), written);
  write_figure(ctx, "figures/crosstab_proportions.svg", svg::crosstab_proportions(tab), written);

  Json counts = Json::array();
  for (const auto& row : tab.counts) counts.push_back(row);
  Json high = Json::array(), geq = Json::array();
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    high.push_back(tab.high_pct(r));
    geq.push_back(tab.geq_med_pct(r));
  }
  Json in = Json::object();
  in[corpus_path.filename().string()] = sha256_file(corpus_path);
  Json j = {{"schema_version", kArtifactSchemaVersion},
            {"crosstab", {{"axes", "information type x harm level"}, {"counts", counts}}},
            {"high_pct", high},
            {"geq_med_pct", geq},
            {"provenance", provenance(ctx, in)}};
  write_file(ctx.path(artifact::kAnalysis), json_text(j));
  ctx.info(fmt::format("analyze: {} records; >=Medium share {:.1f} / {:.1f} / {:.1f}",
                       tab.total(), tab.geq_med_pct(0), tab.geq_med_pct(1), tab.geq_med_pct(2)));
  return tab;
}

std::vector<std::string> report(const Context& ctx) {
  std::vector<std::string> written;
  bool any = false;
  if (fs::exists(ctx.path(artifact::kEvalReport))) {
    any = true;
    const EvalReport r = EvalReport::from_json(read_json(ctx.path(artifact::kEvalReport)));
    write_table(ctx, "tables/overall.tsv", overall_table("model", r), written);
    write_table(ctx, "tables/per_class.tsv", per_class_table(r.metrics), written);
    write_table(ctx, "tables/confusion.tsv", confusion_table(r.confusion), written);
    write_table(ctx, "tables/error_breakdown.tsv", error_breakdown_table(r.breakdown), written);
    if (r.triage) {
      write_table(ctx, "tables/triage_crosstab.tsv", crosstab_table(*r.triage), written);
    }
    write_figure(ctx, "figures/confusion.svg", svg::confusion_grid(r.confusion), written);
    write_figure(ctx, "figures/per_class_f1.svg", svg::per_class_f1({{"model", r.metrics}}),
                 written);
  }
  if (fs::exists(ctx.path(artifact::kAblation))) {
    any = true;
    const Json j = read_json(ctx.path(artifact::kAblation));
    const Json& arms = j.at("arms");
    const EvalReport pair = EvalReport::from_json(arms.at("pair").at("report"));
    const EvalReport base = EvalReport::from_json(arms.at("baseline").at("report"));
    write_table(ctx, "tables/ablation.tsv", ablation_table(pair.metrics, base.metrics), written);
    write_figure(ctx, "figures/ablation_per_class_f1.svg",
                 svg::per_class_f1({{arms.at("baseline").at("arm").get<std::string>(), base.metrics},
                                    {arms.at("pair").at("arm").get<std::string>(), pair.metrics}}),
                 written);
  }
  if (!any) throw IoError("nothing to report: run `eval` or `ablate` first");
  return written;
}

}  // namespace mistriage::pipeline
