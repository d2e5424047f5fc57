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

#include <gtest/gtest.h>

#include "mistriage/error.hpp"
#include "mistriage/rng.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace mistriage {
namespace {

constexpr auto kMis = InfoLabel::kMisinformation;
constexpr auto kPt = InfoLabel::kPartlyTrue;
constexpr auto kTrue = InfoLabel::kTrue;

ConfusionMatrix published() {
  ConfusionMatrix cm;
  const auto g = oracle::published_confusion();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cm.counts[r][c] = g[r][c];
  return cm;
}

ConfusionMatrix random_matrix(Rng& rng) {
  ConfusionMatrix cm;
  for (auto& row : cm.counts)
    for (auto& cell : row) cell = static_cast<std::int64_t>(rng.uniform_index(30));
  cm.counts[0][0] += 1;
  return cm;
}

TEST(Confusion, SinglePair) {
  const std::vector<LabelPair> pairs = {{kMis, kMis}};
  ConfusionMatrix expected;
  expected.counts[0][0] = 1;
  EXPECT_EQ(confusion(pairs), expected);
  EXPECT_THROW(confusion(std::vector<LabelPair>{}), InvalidArgument);
}

TEST(Confusion, ExpandRoundTripAndOrderIndependence) {
  const auto cm = published();
  auto pairs = expand(cm);
  EXPECT_EQ(static_cast<std::int64_t>(pairs.size()), cm.total());
  EXPECT_EQ(cm.total(), 1393);
  EXPECT_EQ(cm.trace(), 1067);
  Rng rng(1);
  rng.shuffle(std::span<LabelPair>(pairs));
  EXPECT_EQ(confusion(pairs), cm);
}

TEST(ClassMetrics, PublishedMatrix) {
  const auto m = class_metrics(published());
  const double expected[3][3] = {{0.714, 0.671, 0.692}, {0.803, 0.833, 0.818},
                                 {0.693, 0.656, 0.674}};
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(m.per_class[c].precision, expected[c][0], 0.001);
    EXPECT_NEAR(m.per_class[c].recall, expected[c][1], 0.001);
    EXPECT_NEAR(m.per_class[c].f1, expected[c][2], 0.001);
  }
  EXPECT_NEAR(m.accuracy, 0.7660, 0.0001);
  EXPECT_NEAR(m.macro_f1, 0.7277, 0.001);
  EXPECT_EQ(m.per_class[0].support, 313);
  EXPECT_FALSE(m.any_undefined());
}

TEST(ClassMetrics, AgreesWithOracleOnRandomMatrices) {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto cm = random_matrix(rng);
    oracle::Grid g;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) g[r][c] = cm.counts[r][c];
    const auto m = class_metrics(cm);
    const auto ref = oracle::per_class(g);
    for (int c = 0; c < 3; ++c) {
      ASSERT_NEAR(m.per_class[c].precision, ref[c].precision, 1e-12);
      ASSERT_NEAR(m.per_class[c].recall, ref[c].recall, 1e-12);
      ASSERT_NEAR(m.per_class[c].f1, ref[c].f1, 1e-12);
    }
    ASSERT_NEAR(m.macro_f1, oracle::macro_f1(g), 1e-12);
    ASSERT_NEAR(m.weighted_f1, oracle::weighted_f1(g), 1e-12);
    // Identities.
    ASSERT_EQ(m.accuracy, static_cast<double>(cm.trace()) / static_cast<double>(cm.total()));
    ASSERT_EQ(m.macro_f1, (m.per_class[0].f1 + m.per_class[1].f1 + m.per_class[2].f1) / 3.0);
    ASSERT_NEAR(m.weighted_recall, m.accuracy, 1e-12);
  }
}

TEST(ClassMetrics, PerfectClassifier) {
  ConfusionMatrix cm;
  cm.counts[0][0] = 4;
  cm.counts[1][1] = 9;
  cm.counts[2][2] = 1;
  const auto m = class_metrics(cm);
  for (const auto& c : m.per_class) {
    EXPECT_EQ(c.precision, 1.0);
    EXPECT_EQ(c.recall, 1.0);
    EXPECT_EQ(c.f1, 1.0);
  }
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_f1, 1.0);
  EXPECT_EQ(m.weighted_f1, 1.0);
}

TEST(ClassMetrics, ZeroDenominatorFlagged) {
  ConfusionMatrix cm;
  cm.counts[0][1] = 3;  // Mis never predicted
  cm.counts[1][1] = 5;
  cm.counts[2][2] = 2;
  const auto m = class_metrics(cm);
  EXPECT_EQ(m.per_class[0].precision, 0.0);
  EXPECT_TRUE(m.per_class[0].precision_undefined);
  EXPECT_FALSE(m.per_class[0].recall_undefined);
  EXPECT_EQ(m.per_class[0].f1, 0.0);
  EXPECT_TRUE(m.any_undefined());
  EXPECT_THROW(class_metrics(ConfusionMatrix{}), InvalidArgument);
}

TEST(Bootstrap, PerfectPredictionsGiveDegenerateInterval) {
  std::vector<LabelPair> pairs = {{kMis, kMis}, {kPt, kPt}, {kTrue, kTrue}, {kPt, kPt}};
  const auto ci = bootstrap_ci(pairs, Metric::kMacroF1, 500, 0.05, 3);
  EXPECT_EQ(ci.lower, 1.0);
  EXPECT_EQ(ci.upper, 1.0);
  EXPECT_EQ(ci.point, 1.0);
}

TEST(Bootstrap, SeedDeterminesDistribution) {
  const auto pairs = expand(published());
  EXPECT_EQ(bootstrap_distribution(pairs, Metric::kAccuracy, 50, 4),
            bootstrap_distribution(pairs, Metric::kAccuracy, 50, 4));
  EXPECT_NE(bootstrap_distribution(pairs, Metric::kAccuracy, 50, 4),
            bootstrap_distribution(pairs, Metric::kAccuracy, 50, 5));
  // Iteration i does not depend on how many iterations precede or follow it.
  auto short_run = bootstrap_distribution(pairs, Metric::kAccuracy, 10, 4);
  auto long_run = bootstrap_distribution(pairs, Metric::kAccuracy, 50, 4);
  EXPECT_TRUE(std::equal(short_run.begin(), short_run.end(), long_run.begin()));
}

TEST(Bootstrap, SmallSampleMatchesExactEnumeration) {
  const std::vector<LabelPair> pairs = {{kMis, kMis}, {kPt, kMis}, {kTrue, kTrue}};
  const std::vector<std::pair<int, int>> raw = {{0, 0}, {1, 0}, {2, 2}};
  const auto exact = oracle::exact_bootstrap_macro_f1(raw);
  const std::size_t n = 100000;
  const auto draws = bootstrap_distribution(pairs, Metric::kMacroF1, n, 123);
  double total_prob = 0.0;
  for (const auto& [value, prob] : exact) {
    total_prob += prob;
    const auto hits = std::count_if(draws.begin(), draws.end(),
                                    [&](double d) { return std::abs(d - value) < 1e-12; });
    const double freq = static_cast<double>(hits) / n;
    // five standard errors
    EXPECT_NEAR(freq, prob, 5.0 * std::sqrt(prob * (1 - prob) / n) + 1e-12) << value;
  }
  EXPECT_NEAR(total_prob, 1.0, 1e-12);
  for (double d : draws) {
    ASSERT_TRUE(std::any_of(exact.begin(), exact.end(),
                            [&](const auto& kv) { return std::abs(kv.first - d) < 1e-12; }));
  }
}

TEST(Bootstrap, IntervalBracketsPointEstimate) {
  const auto pairs = expand(published());
  int bracketed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ci = bootstrap_ci(pairs, Metric::kMacroF1, 400, 0.05, seed);
    if (ci.lower <= ci.point && ci.point <= ci.upper) ++bracketed;
    EXPECT_LT(ci.lower, ci.upper);
    EXPECT_EQ(ci.iterations, 400u);
    EXPECT_EQ(ci.seed, seed);
  }
  EXPECT_GE(bracketed, 19);
}

TEST(Percentile, LinearInterpolation) {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  EXPECT_EQ(percentile_sorted(v, 0.0), 1.0);
  EXPECT_EQ(percentile_sorted(v, 1.0), 5.0);
  EXPECT_EQ(percentile_sorted(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(v, 0.125), 1.5);
  const std::vector<double> one = {7};
  EXPECT_EQ(percentile_sorted(one, 0.3), 7.0);
}

TEST(Metric, Names) {
  EXPECT_EQ(parse_metric(to_string(Metric::kAccuracy)), Metric::kAccuracy);
  EXPECT_EQ(parse_metric("macro_f1"), Metric::kMacroF1);
  EXPECT_THROW(parse_metric("auc"), InvalidArgument);
  EXPECT_DOUBLE_EQ(metric_value(published(), Metric::kAccuracy), 1067.0 / 1393.0);
}

TEST(Kappa, ReferenceValues) {
  const std::vector<int> a = {0, 0, 1, 1}, b = {0, 1, 0, 1};
  EXPECT_NEAR(cohens_kappa(a, b), 0.0, 1e-15);
  const std::vector<int> same = {0, 1, 2, 2, 1};
  EXPECT_DOUBLE_EQ(cohens_kappa(same, same), 1.0);
  // p_o = 0.6, p_e = (0.4*0.2 + 0.6*0.8) = 0.56
  const std::vector<int> x = {0, 0, 1, 1, 1}, y = {0, 1, 1, 1, 1};
  EXPECT_NEAR(cohens_kappa(x, y), (0.8 - 0.56) / (1 - 0.56), 1e-12);
  const std::vector<int> shorter = {0};
  EXPECT_THROW(cohens_kappa(a, shorter), InvalidArgument);
  EXPECT_THROW(cohens_kappa(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
}

TEST(Kappa, NeverAboveOne) {
  Rng rng(9);
  for (int t = 0; t < 300; ++t) {
    std::vector<int> a, b;
    const auto n = 2 + rng.uniform_index(30);
    for (std::uint64_t i = 0; i < n; ++i) {
      a.push_back(static_cast<int>(rng.uniform_index(3)));
      b.push_back(static_cast<int>(rng.uniform_index(3)));
    }
    const double k = cohens_kappa(a, b);
    ASSERT_LE(k, 1.0 + 1e-12);
    if (a != b) {
      ASSERT_LT(k, 1.0);
    }
  }
}

TEST(CrossTab, PublishedCounts) {
  const auto tab = crosstab(synthetic::clean_corpus_with_counts(synthetic::published_crosstab()));
  EXPECT_EQ(tab.total(), 9224);
  EXPECT_NEAR(tab.geq_med_pct(0), 55.9, 0.05);
  EXPECT_NEAR(tab.geq_med_pct(1), 21.8, 0.05);
  EXPECT_NEAR(tab.geq_med_pct(2), 1.0, 0.05);
  EXPECT_NEAR(tab.high_pct(0), 18.1, 0.05);
  EXPECT_NEAR(tab.high_pct(1), 1.3, 0.05);
  EXPECT_NEAR(tab.high_pct(2), 0.0, 0.05);
  EXPECT_DOUBLE_EQ(tab.high_pct(0), 100.0 * 377 / 2082);
  EXPECT_DOUBLE_EQ(tab.total_high_pct(), 100.0 * 447 / 9224);
}

TEST(CrossTab, DegenerateAndOrderIndependent) {
  const auto tab = crosstab(synthetic::clean_corpus_with_counts({{{0, 0, 0}, {0, 0, 0}, {5, 0, 0}}}));
  EXPECT_EQ(tab.geq_med_pct(2), 0.0);
  EXPECT_EQ(tab.row_total(0), 0);
  EXPECT_EQ(tab.row_pct(0, 0), 0.0);
  EXPECT_EQ(tab.total(), 5);

  std::vector<std::pair<InfoLabel, HarmLabel>> rows = {
      {kMis, HarmLabel::kHigh}, {kPt, HarmLabel::kLow}, {kMis, HarmLabel::kLow}};
  const auto a = crosstab(rows);
  std::reverse(rows.begin(), rows.end());
  EXPECT_EQ(crosstab(rows).counts, a.counts);
  EXPECT_EQ(a.col_total(0), 2);
}

TEST(ErrorBreakdown, PublishedMatrix) {
  const auto b = error_breakdown(published());
  EXPECT_EQ(b.total_errors, 326);
  ASSERT_EQ(b.cells.size(), 6u);
  const std::int64_t counts[] = {95, 78, 77, 62, 8, 6};
  const double pcts[] = {29.1, 23.9, 23.6, 19.0, 2.5, 1.8};
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(b.cells[i].count, counts[i]);
    EXPECT_NEAR(b.cells[i].pct_of_errors, pcts[i], 0.05);
  }
  EXPECT_EQ(b.cells[0].truth, kMis);
  EXPECT_EQ(b.cells[0].predicted, kPt);
}

TEST(ErrorBreakdown, DiagonalAndTies) {
  ConfusionMatrix diag;
  diag.counts[1][1] = 5;
  const auto none = error_breakdown(diag);
  EXPECT_TRUE(none.cells.empty());
  EXPECT_EQ(none.total_errors, 0);

  ConfusionMatrix tie;
  tie.counts[2][0] = 4;
  tie.counts[0][2] = 4;
  tie.counts[1][0] = 4;
  const auto b = error_breakdown(tie);
  ASSERT_EQ(b.cells.size(), 3u);
  EXPECT_EQ(b.cells[0].truth, kMis);
  EXPECT_EQ(b.cells[0].predicted, kTrue);
  EXPECT_EQ(b.cells[1].truth, kPt);
  EXPECT_EQ(b.cells[2].truth, kTrue);
}

std::pair<std::vector<InfoLabel>, std::vector<InfoLabel>> split_pairs(
    const std::vector<LabelPair>& pairs) {
  std::vector<InfoLabel> truth, pred;
  for (const auto& [t, p] : pairs) {
    truth.push_back(t);
    pred.push_back(p);
  }
  return {pred, truth};
}

TEST(Evaluate, PublishedPredictions) {
  const auto [pred, truth] = split_pairs(expand(published()));
  EvalOptions opts;
  opts.bootstrap_iterations = 200;
  opts.seed = 1;
  const auto r = evaluate(pred, truth, {}, opts);
  EXPECT_EQ(r.confusion, published());
  EXPECT_NEAR(r.metrics.accuracy, 0.7660, 0.0001);
  EXPECT_EQ(r.breakdown.total_errors, 326);
  EXPECT_FALSE(r.triage.has_value());
  EXPECT_EQ(r.macro_f1_ci.iterations, 200u);
}

TEST(Evaluate, PerfectPredictions) {
  const std::vector<InfoLabel> labels = {kMis, kPt, kTrue, kTrue};
  const std::vector<HarmLabel> harm = {HarmLabel::kHigh, HarmLabel::kLow, HarmLabel::kLow,
                                       HarmLabel::kMedium};
  EvalOptions opts;
  opts.bootstrap_iterations = 100;
  const auto r = evaluate(labels, labels, harm, opts);
  EXPECT_EQ(r.metrics.accuracy, 1.0);
  EXPECT_TRUE(r.breakdown.cells.empty());
  EXPECT_EQ(r.macro_f1_ci.lower, 1.0);
  EXPECT_EQ(r.macro_f1_ci.upper, 1.0);
  ASSERT_TRUE(r.triage.has_value());
  EXPECT_EQ(r.triage->counts[0][2], 1);
  EXPECT_EQ(r.triage->counts[2][2], 0);
}

TEST(Evaluate, Misalignment) {
  const std::vector<InfoLabel> a = {kMis, kPt}, b = {kMis};
  const std::vector<HarmLabel> h = {HarmLabel::kLow};
  EXPECT_THROW(evaluate(a, b, {}, {}), InvalidArgument);
  EXPECT_THROW(evaluate(b, b, std::vector<HarmLabel>{HarmLabel::kLow, HarmLabel::kLow}, {}),
               InvalidArgument);
  EXPECT_THROW(evaluate(std::vector<InfoLabel>{}, std::vector<InfoLabel>{}, {}, {}),
               InvalidArgument);
  (void)h;
}

TEST(EvalReport, JsonRoundTripIsLossless) {
  const auto [pred, truth] = split_pairs(expand(published()));
  std::vector<HarmLabel> harm(truth.size(), HarmLabel::kMedium);
  harm[0] = HarmLabel::kHigh;
  EvalOptions opts;
  opts.bootstrap_iterations = 100;
  auto r = evaluate(pred, truth, harm, opts);
  r.provenance = {{"config_hash", "abc"}};
  const auto j = r.to_json();
  const auto back = EvalReport::from_json(j);
  EXPECT_EQ(back.to_json(), j);
  EXPECT_EQ(back.to_json().dump(), j.dump());
  EXPECT_EQ(back.confusion, r.confusion);
  EXPECT_EQ(back.metrics.macro_f1, r.metrics.macro_f1);
  EXPECT_EQ(back.macro_f1_ci.lower, r.macro_f1_ci.lower);
  EXPECT_THROW(EvalReport::from_json(nlohmann::json::object()), ParseError);
}

}  // namespace
}  // namespace mistriage
