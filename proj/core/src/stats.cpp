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

#include "mistriage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "mistriage/error.hpp"
#include "mistriage/rng.hpp"

namespace mistriage {

// ---------------------------------------------------------------- confusion

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts)
    for (auto v : row) t += v;
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) t += counts[i][i];
  return t;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t r) const {
  std::int64_t s = 0;
  for (auto v : counts[r]) s += v;
  return s;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t c) const {
  std::int64_t s = 0;
  for (const auto& row : counts) s += row[c];
  return s;
}

ConfusionMatrix confusion(std::span<const LabelPair> pairs) {
  if (pairs.empty()) throw InvalidArgument("confusion matrix of an empty prediction list");
  ConfusionMatrix cm;
  for (const auto& [truth, pred] : pairs) ++cm.counts[index(truth)][index(pred)];
  return cm;
}

std::vector<LabelPair> expand(const ConfusionMatrix& cm) {
  std::vector<LabelPair> pairs;
  pairs.reserve(static_cast<std::size_t>(cm.total()));
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      for (std::int64_t k = 0; k < cm.counts[t][p]; ++k) {
        pairs.emplace_back(kInfoLabels[t], kInfoLabels[p]);
      }
    }
  }
  return pairs;
}

// ---------------------------------------------------------------- metrics

bool ClassMetrics::any_undefined() const {
  return std::any_of(per_class.begin(), per_class.end(), [](const PerClassMetrics& m) {
    return m.precision_undefined || m.recall_undefined;
  });
}

namespace {

PerClassMetrics per_class_metrics(const ConfusionMatrix& cm, std::size_t c) {
  PerClassMetrics m;
  const auto tp = static_cast<double>(cm.counts[c][c]);
  const std::int64_t predicted = cm.col_sum(c);
  m.support = cm.row_sum(c);
  if (predicted == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = tp / static_cast<double>(predicted);
  }
  if (m.support == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = tp / static_cast<double>(m.support);
  }
  const double denom = m.precision + m.recall;
  m.f1 = denom > 0.0 ? 2.0 * m.precision * m.recall / denom : 0.0;
  return m;
}

bool class_present(const ConfusionMatrix& cm, std::size_t c) {
  return cm.row_sum(c) > 0 || cm.col_sum(c) > 0;
}

// Allocation-free macro F1 for the bootstrap inner loop.
double fast_macro_f1(const ConfusionMatrix& cm) {
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (!class_present(cm, c)) continue;
    sum += per_class_metrics(cm, c).f1;
    ++present;
  }
  return sum / static_cast<double>(present);
}

}  // namespace

ClassMetrics class_metrics(const ConfusionMatrix& cm) {
  ClassMetrics out;
  out.total = cm.total();
  if (out.total == 0) throw InvalidArgument("class metrics of an empty confusion matrix");
  const auto total = static_cast<double>(out.total);
  std::size_t present = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const PerClassMetrics m = per_class_metrics(cm, c);
    out.per_class[c] = m;
    if (class_present(cm, c)) {
      out.macro_precision += m.precision;
      out.macro_recall += m.recall;
      out.macro_f1 += m.f1;
      ++present;
    }
    const double w = static_cast<double>(m.support) / total;
    out.weighted_precision += w * m.precision;
    out.weighted_recall += w * m.recall;
    out.weighted_f1 += w * m.f1;
  }
  out.macro_precision /= static_cast<double>(present);
  out.macro_recall /= static_cast<double>(present);
  out.macro_f1 /= static_cast<double>(present);
  out.accuracy = static_cast<double>(cm.trace()) / total;
  return out;
}

std::string_view to_string(Metric metric) {
  return metric == Metric::kMacroF1 ? "macro_f1" : "accuracy";
}

Metric parse_metric(std::string_view name) {
  if (name == "macro_f1") return Metric::kMacroF1;
  if (name == "accuracy") return Metric::kAccuracy;
  throw InvalidArgument(fmt::format("unknown metric \"{}\"", name));
}

double metric_value(const ConfusionMatrix& cm, Metric metric) {
  if (metric == Metric::kAccuracy) {
    return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  }
  return fast_macro_f1(cm);
}

// ---------------------------------------------------------------- bootstrap

std::vector<double> bootstrap_distribution(std::span<const LabelPair> pairs, Metric metric,
                                           std::size_t iterations, std::uint64_t seed) {
  if (pairs.empty()) throw InvalidArgument("bootstrap over an empty prediction list");
  const auto n = static_cast<std::uint64_t>(pairs.size());
  std::vector<std::uint8_t> cell(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    cell[i] = static_cast<std::uint8_t>(index(pairs[i].first) * kNumClasses +
                                        index(pairs[i].second));
  }
  std::vector<double> values(iterations);
  for (std::size_t it = 0; it < iterations; ++it) {
    Rng rng(derive_seed(seed, "bootstrap", it));
    ConfusionMatrix cm;
    for (std::uint64_t k = 0; k < n; ++k) {
      const std::uint8_t c = cell[rng.uniform_index(n)];
      ++cm.counts[c / kNumClasses][c % kNumClasses];
    }
    values[it] = metric_value(cm, metric);
  }
  return values;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("percentile of an empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BootstrapCI bootstrap_ci(std::span<const LabelPair> pairs, Metric metric,
                         std::size_t iterations, double alpha, std::uint64_t seed) {
  if (iterations == 0) throw InvalidArgument("bootstrap needs at least one iteration");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must be in (0, 1)");
  std::vector<double> values = bootstrap_distribution(pairs, metric, iterations, seed);
  std::sort(values.begin(), values.end());
  BootstrapCI ci;
  ci.metric = metric;
  ci.point = metric_value(confusion(pairs), metric);
  ci.lower = percentile_sorted(values, alpha / 2.0);
  ci.upper = percentile_sorted(values, 1.0 - alpha / 2.0);
  ci.iterations = iterations;
  ci.alpha = alpha;
  ci.seed = seed;
  return ci;
}

// ---------------------------------------------------------------- kappa

double cohens_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw InvalidArgument("kappa inputs differ in length");
  if (a.empty()) throw InvalidArgument("kappa of empty label lists");
  const auto n = static_cast<double>(a.size());
  std::map<int, std::pair<double, double>> marginals;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) agree += 1.0;
    marginals[a[i]].first += 1.0;
    marginals[b[i]].second += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [label, m] : marginals) p_e += (m.first / n) * (m.second / n);
  if (p_e >= 1.0) return 1.0;  // both raters used one identical label throughout
  return (p_o - p_e) / (1.0 - p_e);
}

// ---------------------------------------------------------------- crosstab

std::int64_t CrossTab::row_total(std::size_t info) const {
  std::int64_t s = 0;
  for (auto v : counts[info]) s += v;
  return s;
}

std::int64_t CrossTab::col_total(std::size_t harm) const {
  std::int64_t s = 0;
  for (const auto& row : counts) s += row[harm];
  return s;
}

std::int64_t CrossTab::total() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) s += row_total(i);
  return s;
}

namespace {
double pct(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double CrossTab::row_pct(std::size_t info, std::size_t harm) const {
  return pct(counts[info][harm], row_total(info));
}

double CrossTab::high_pct(std::size_t info) const {
  return pct(counts[info][index(HarmLabel::kHigh)], row_total(info));
}

double CrossTab::geq_med_pct(std::size_t info) const {
  return pct(counts[info][index(HarmLabel::kMedium)] + counts[info][index(HarmLabel::kHigh)],
             row_total(info));
}

double CrossTab::total_high_pct() const { return pct(col_total(index(HarmLabel::kHigh)), total()); }

double CrossTab::total_geq_med_pct() const {
  return pct(col_total(index(HarmLabel::kMedium)) + col_total(index(HarmLabel::kHigh)), total());
}

CrossTab crosstab(std::span<const std::pair<InfoLabel, HarmLabel>> rows) {
  CrossTab t;
  for (const auto& [info, harm] : rows) ++t.counts[index(info)][index(harm)];
  return t;
}

CrossTab crosstab(const CleanCorpus& corpus) {
  if (corpus.size() == 0) throw InvalidArgument("crosstab of an empty corpus");
  std::vector<std::pair<InfoLabel, HarmLabel>> rows;
  rows.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) rows.emplace_back(corpus.info(i), corpus.harm(i));
  return crosstab(rows);
}

// ---------------------------------------------------------------- errors

ErrorBreakdown error_breakdown(const ConfusionMatrix& cm) {
  ErrorBreakdown out;
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      if (t == p || cm.counts[t][p] == 0) continue;
      out.cells.push_back({kInfoLabels[t], kInfoLabels[p], cm.counts[t][p], 0.0});
      out.total_errors += cm.counts[t][p];
    }
  }
  std::stable_sort(out.cells.begin(), out.cells.end(),
                   [](const ErrorCell& a, const ErrorCell& b) { return a.count > b.count; });
  for (auto& c : out.cells) c.pct_of_errors = pct(c.count, out.total_errors);
  return out;
}

// ---------------------------------------------------------------- evaluate

EvalReport evaluate(std::span<const InfoLabel> predicted, std::span<const InfoLabel> truth,
                    std::span<const HarmLabel> harm, const EvalOptions& options) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgument(fmt::format("{} predictions for {} labels", predicted.size(),
                                      truth.size()));
  }
  if (!harm.empty() && harm.size() != truth.size()) {
    throw InvalidArgument("harm labels are not aligned with the predictions");
  }
  std::vector<LabelPair> pairs;
  pairs.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) pairs.emplace_back(truth[i], predicted[i]);

  EvalReport report;
  report.confusion = confusion(pairs);
  report.metrics = class_metrics(report.confusion);
  report.macro_f1_ci = bootstrap_ci(pairs, Metric::kMacroF1, options.bootstrap_iterations,
                                    options.alpha, options.seed);
  report.breakdown = error_breakdown(report.confusion);
  if (!harm.empty()) {
    std::vector<std::pair<InfoLabel, HarmLabel>> rows;
    rows.reserve(harm.size());
    for (std::size_t i = 0; i < harm.size(); ++i) rows.emplace_back(predicted[i], harm[i]);
    report.triage = crosstab(rows);
  }
  return report;
}

}  // namespace mistriage
