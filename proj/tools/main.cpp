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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mistriage/config.hpp"
#include "mistriage/error.hpp"
#include "mistriage/pipeline.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitLineage = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Misinformation triage experiments: ingest, split, train, evaluate, analyze."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override the top-level seed");
  app.add_option("--out", out_dir, "Output directory (overrides paths.out)");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  std::string ingest_input;
  auto* ingest = app.add_subcommand("ingest", "Parse, normalize and clean a raw corpus");
  ingest->add_option("input", ingest_input, "CSV or JSONL corpus (defaults to paths.corpus)");

  auto* split = app.add_subcommand("split", "Stratified train/val/test split");
  auto* tok = app.add_subcommand("tokenizer-train", "Train the subword vocabulary on train");
  auto* train = app.add_subcommand("train", "Train the classifier");
  auto* eval = app.add_subcommand("eval", "Evaluate the checkpoint on the test split");
  auto* ablate = app.add_subcommand("ablate", "Train and compare the two encoding arms");

  std::string analyze_input;
  auto* analyze = app.add_subcommand("analyze", "Information type x harm level coupling");
  analyze->add_option("corpus", analyze_input, "Labelled corpus (defaults to the cleaned one)");

  auto* report = app.add_subcommand("report", "Regenerate tables and figures");

  CLI11_PARSE(app, argc, argv);

  try {
    mistriage::RunConfig config =
        config_path.empty() ? mistriage::RunConfig{} : mistriage::RunConfig::load(config_path);
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.out_dir = out_dir;
    config.validate();

    auto ctx = mistriage::pipeline::Context::from_config(config);
    if (!quiet) ctx.log = [](const std::string& m) { std::cerr << m << '\n'; };

    if (ingest->parsed()) {
      const std::string input = ingest_input.empty() ? config.corpus_path : ingest_input;
      if (input.empty()) throw mistriage::InvalidArgument("ingest needs an input corpus");
      mistriage::pipeline::ingest(ctx, input);
    } else if (split->parsed()) {
      mistriage::pipeline::split(ctx);
    } else if (tok->parsed()) {
      mistriage::pipeline::tokenizer_train(ctx);
    } else if (train->parsed()) {
      mistriage::pipeline::train(ctx);
    } else if (eval->parsed()) {
      mistriage::pipeline::eval(ctx);
    } else if (ablate->parsed()) {
      mistriage::pipeline::ablate(ctx);
    } else if (analyze->parsed()) {
      const std::string input = analyze_input.empty()
                                    ? ctx.path(mistriage::pipeline::artifact::kCleanCorpus).string()
                                    : analyze_input;
      mistriage::pipeline::analyze(ctx, input);
    } else if (report->parsed()) {
      for (const auto& name : mistriage::pipeline::report(ctx)) ctx.info("wrote " + name);
    }
  } catch (const mistriage::LineageError& e) {
    std::cerr << "lineage error: " << e.what() << '\n';
    return kExitLineage;
  } catch (const mistriage::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
