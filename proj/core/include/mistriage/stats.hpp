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

// Evaluation statistics over three-class predictions.
//
// All metrics follow one zero-denominator rule: a precision or recall whose
// denominator is empty is 0 and flagged, and an F1 with P + R = 0 is 0.
// Macro averages run over the classes that occur in the truth or the
// predictions, so a bootstrap resample that misses a class entirely is not
// penalized for it. A class that is present but never predicted still
// counts with F1 0.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mistriage/corpus.hpp"

namespace mistriage {

// (true label, predicted label)
using LabelPair = std::pair<InfoLabel, InfoLabel>;

struct ConfusionMatrix {
  // counts[true][predicted]
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};

  std::int64_t total() const;
  std::int64_t trace() const;
  std::int64_t row_sum(std::size_t r) const;
  std::int64_t col_sum(std::size_t c) const;
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws InvalidArgument on an empty list.
ConfusionMatrix confusion(std::span<const LabelPair> pairs);

// Every cell expands to that many identical pairs, row-major.
std::vector<LabelPair> expand(const ConfusionMatrix& cm);

struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct ClassMetrics {
  std::array<PerClassMetrics, kNumClasses> per_class{};
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::int64_t total = 0;

  bool any_undefined() const;
};

// Throws InvalidArgument when the matrix is empty.
ClassMetrics class_metrics(const ConfusionMatrix& cm);

enum class Metric { kMacroF1, kAccuracy };
std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);
double metric_value(const ConfusionMatrix& cm, Metric metric);

struct BootstrapCI {
  Metric metric = Metric::kMacroF1;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t iterations = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

// Metric value of each resample. Iteration i draws its n indices from a
// generator seeded with derive_seed(seed, "bootstrap", i), so the result is
// independent of evaluation order.
std::vector<double> bootstrap_distribution(std::span<const LabelPair> pairs, Metric metric,
                                           std::size_t iterations, std::uint64_t seed);

// Percentile interval: [alpha/2, 1 - alpha/2] quantiles of the resampled
// metric with linear interpolation between order statistics.
BootstrapCI bootstrap_ci(std::span<const LabelPair> pairs, Metric metric,
                         std::size_t iterations = 5000, double alpha = 0.05,
                         std::uint64_t seed = 0);

// Quantile q of ascending `sorted` values, linear between order statistics.
double percentile_sorted(std::span<const double> sorted, double q);

// Throws InvalidArgument on length mismatch or empty input.
double cohens_kappa(std::span<const int> a, std::span<const int> b);

struct CrossTab {
  // counts[info][harm]
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};

  std::int64_t row_total(std::size_t info) const;
  std::int64_t col_total(std::size_t harm) const;
  std::int64_t total() const;
  // Percentages in [0, 100]; a zero row yields 0.
  double row_pct(std::size_t info, std::size_t harm) const;
  double high_pct(std::size_t info) const;
  double geq_med_pct(std::size_t info) const;
  double total_high_pct() const;
  double total_geq_med_pct() const;
};

CrossTab crosstab(std::span<const std::pair<InfoLabel, HarmLabel>> rows);
CrossTab crosstab(const CleanCorpus& corpus);

struct ErrorCell {
  InfoLabel truth;
  InfoLabel predicted;
  std::int64_t count = 0;
  double pct_of_errors = 0.0;  // in [0, 100]
};

struct ErrorBreakdown {
  std::vector<ErrorCell> cells;  // non-zero off-diagonal, count descending
  std::int64_t total_errors = 0;
};

// Ties in count keep row-major order.
ErrorBreakdown error_breakdown(const ConfusionMatrix& cm);

struct EvalOptions {
  std::size_t bootstrap_iterations = 5000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

struct EvalReport {
  static constexpr int kSchemaVersion = 1;

  ConfusionMatrix confusion;
  ClassMetrics metrics;
  BootstrapCI macro_f1_ci;
  ErrorBreakdown breakdown;
  // Predicted information type x true harm level, when harm labels exist.
  std::optional<CrossTab> triage;
  nlohmann::json provenance = nlohmann::json::object();

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

// Throws InvalidArgument when the spans are misaligned or empty. `harm` may
// be empty; otherwise it must align with `truth`.
EvalReport evaluate(std::span<const InfoLabel> predicted, std::span<const InfoLabel> truth,
                    std::span<const HarmLabel> harm, const EvalOptions& options);

}  // namespace mistriage
