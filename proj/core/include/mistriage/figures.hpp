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

// Standalone SVG documents. Output depends only on the arguments: coordinates
// are printed with fixed precision and nothing time- or host-dependent is
// embedded, so figures can be compared byte for byte.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mistriage/corpus.hpp"
#include "mistriage/stats.hpp"

namespace mistriage::svg {

struct Series {
  std::string name;
  std::vector<double> values;  // one per group
};

// Vertical bars, one per label.
std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::string& y_label);

// Clusters of bars, one cluster per group and one bar per series.
std::string grouped_bar_chart(const std::string& title, const std::vector<std::string>& groups,
                              const std::vector<Series>& series, const std::string& y_label);

// Cell shading scales with value / max_value; `cell_text` labels each cell.
std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels,
                    const std::vector<std::vector<double>>& values,
                    const std::vector<std::vector<std::string>>& cell_text, double max_value);

std::string class_distribution(const CleanCorpus& corpus);
std::string crosstab_counts(const CrossTab& tab);
std::string crosstab_proportions(const CrossTab& tab);
std::string per_class_f1(const std::vector<std::pair<std::string, ClassMetrics>>& runs);
std::string confusion_grid(const ConfusionMatrix& cm);

std::string escape_xml(std::string_view text);

}  // namespace mistriage::svg
