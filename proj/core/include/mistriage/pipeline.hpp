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

// The experiment stages. Each stage reads its inputs from the output
// directory, checks their lineage, and writes its artifacts back there.
// Artifacts record the sha256 of every artifact they were built from, the
// config hash and the seed; file names are recorded relative to the output
// directory so runs in different directories produce identical bytes.

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mistriage/config.hpp"
#include "mistriage/corpus.hpp"
#include "mistriage/report.hpp"
#include "mistriage/stats.hpp"
#include "mistriage/tokenizer.hpp"
#include "mistriage/train.hpp"

namespace mistriage::pipeline {

namespace artifact {
inline constexpr const char* kCleanCorpus = "corpus.clean.csv";
inline constexpr const char* kCleanStats = "clean_stats.json";
inline constexpr const char* kDistribution = "tables/distribution.tsv";
inline constexpr const char* kSplits = "splits.json";
inline constexpr const char* kVocab = "vocab.txt";
inline constexpr const char* kCheckpoint = "model.ckpt";
inline constexpr const char* kHistory = "history.jsonl";
inline constexpr const char* kEvalReport = "eval_report.json";
inline constexpr const char* kAblation = "ablation.json";
inline constexpr const char* kAnalysis = "analysis.json";
}  // namespace artifact

inline constexpr int kArtifactSchemaVersion = 1;

struct Context {
  RunConfig config;
  std::filesystem::path out;
  std::function<void(const std::string&)> log;  // may be empty

  static Context from_config(RunConfig config);
  void info(const std::string& message) const;
  std::filesystem::path path(const std::string& name) const { return out / name; }
};

struct IngestResult {
  CleanStats stats;
  std::vector<RowError> row_errors;
  std::array<std::size_t, kNumClasses> class_counts{};
};

// parse -> normalize labels -> clean. Row errors are recorded; the corpus is
// written as long as at least one record survives.
IngestResult ingest(const Context& ctx, const std::filesystem::path& input);

Splits split(const Context& ctx);
Vocab tokenizer_train(const Context& ctx);
TrainHistory train(const Context& ctx);
EvalReport eval(const Context& ctx);

struct ArmResult {
  EncodingArm arm;
  TrainHistory history;
  EvalReport report;
};

struct AblationResult {
  ArmResult pair;      // the configured arm
  ArmResult baseline;  // the configured baseline
  AblationDelta delta;
};

AblationResult ablate(const Context& ctx);

// Cross-tabulation of a labelled corpus file. Throws InvalidArgument when
// any record lacks a harm or information-type label.
CrossTab analyze(const Context& ctx, const std::filesystem::path& corpus);

// Rewrites tables and figures from eval_report.json (and ablation.json when
// present). Returns the relative paths written.
std::vector<std::string> report(const Context& ctx);

// Loaded shared inputs. Exposed for tests.
CleanCorpus load_clean_corpus(const std::filesystem::path& path);
nlohmann::json splits_to_json(const Splits& splits);
Splits splits_from_json(const nlohmann::json& j);

}  // namespace mistriage::pipeline
