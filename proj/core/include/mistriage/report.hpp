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

// Flat tab-separated exports. Values are rounded here and nowhere else:
// percentages to 1 decimal, ratios to 4.

#pragma once

#include <string>

#include "mistriage/corpus.hpp"
#include "mistriage/stats.hpp"

namespace mistriage {

std::string format_pct(double pct);
std::string format_ratio(double ratio);

// Class, count and share of the corpus for each information type and harm level.
std::string distribution_table(const CleanCorpus& corpus);

// Class, precision, recall, F1, support; then macro and weighted rows.
std::string per_class_table(const ClassMetrics& metrics);

// Accuracy, macro P/R/F1 and the bootstrap interval in one row.
std::string overall_table(std::string_view name, const EvalReport& report);

std::string confusion_table(const ConfusionMatrix& cm);

// Rank, true, predicted, count, % of errors; then a total row.
std::string error_breakdown_table(const ErrorBreakdown& breakdown);

// Counts per harm level with High% and >=Med% columns and a total row.
std::string crosstab_table(const CrossTab& tab);

// Row-normalized percentages.
std::string crosstab_proportions_table(const CrossTab& tab);

struct AblationDelta {
  double macro_f1 = 0.0;
  double mis_recall = 0.0;
  double mis_f1 = 0.0;

  static AblationDelta between(const ClassMetrics& pair, const ClassMetrics& single);
};

// One row per arm plus a delta row, in percentage points.
std::string ablation_table(const ClassMetrics& pair, const ClassMetrics& single);

}  // namespace mistriage
