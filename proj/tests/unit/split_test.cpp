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


#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "mistriage/corpus.hpp"
#include "mistriage/error.hpp"
#include "synthetic.hpp"

namespace mistriage {
namespace {

TEST(LargestRemainder, SingleClassOfTen) {
  // 7 / 1.5 / 1.5: val and test tie on remainder, val is earlier and wins.
  EXPECT_EQ(largest_remainder_quotas(10, {0.7, 0.15, 0.15}),
            (std::array<std::size_t, 3>{7, 2, 1}));
}

TEST(LargestRemainder, ExactAndZeroRatios) {
  EXPECT_EQ(largest_remainder_quotas(100, {0.7, 0.15, 0.15}),
            (std::array<std::size_t, 3>{70, 15, 15}));
  EXPECT_EQ(largest_remainder_quotas(9, {1.0, 0.0, 0.0}), (std::array<std::size_t, 3>{9, 0, 0}));
  EXPECT_EQ(largest_remainder_quotas(0, {0.7, 0.15, 0.15}), (std::array<std::size_t, 3>{0, 0, 0}));
}

TEST(LargestRemainder, WithinOneOfExactForAllSizes) {
  const std::array<double, 3> ratios = {0.7, 0.15, 0.15};
  for (std::size_t n = 0; n < 500; ++n) {
    auto q = largest_remainder_quotas(n, ratios);
    ASSERT_EQ(q[0] + q[1] + q[2], n);
    for (int s = 0; s < 3; ++s) {
      ASSERT_LE(std::abs(static_cast<double>(q[s]) - ratios[s] * n), 1.0) << n;
    }
  }
}

TEST(SplitSpec, Validation) {
  SplitSpec ok;
  EXPECT_NO_THROW(ok.validate());
  SplitSpec bad;
  bad.ratios = {0.7, 0.2, 0.2};
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad.ratios = {1.1, -0.05, -0.05};
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(StratifiedSplit, PartitionAndBoundsAcrossSeeds) {
  auto corpus = synthetic::corpus_with_class_counts(37, 101, 23);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SplitSpec spec;
    spec.seed = seed;
    auto s = stratified_split(corpus, spec);
    std::vector<std::size_t> all;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      ASSERT_TRUE(std::is_sorted(part->begin(), part->end()));
      all.insert(all.end(), part->begin(), part->end());
    }
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), corpus.size());
    for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);

    const std::array<std::size_t, 3> totals = {37, 101, 23};
    int split_index = 0;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      auto counts = class_counts(corpus, *part);
      for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_LE(std::abs(static_cast<double>(counts[c]) -
                           spec.ratios[split_index] * static_cast<double>(totals[c])),
                  1.0);
      }
      ++split_index;
    }
  }
}

TEST(StratifiedSplit, DeterministicPerSeed) {
  auto corpus = synthetic::corpus_with_class_counts(30, 30, 30);
  SplitSpec spec;
  spec.seed = 99;
  EXPECT_EQ(stratified_split(corpus, spec), stratified_split(corpus, spec));
  SplitSpec other = spec;
  other.seed = 100;
  EXPECT_NE(stratified_split(corpus, spec), stratified_split(corpus, other));
}

TEST(StratifiedSplit, SingleClassCorpus) {
  auto corpus = synthetic::corpus_with_class_counts(0, 10, 0);
  auto s = stratified_split(corpus, SplitSpec{});
  EXPECT_EQ(s.train.size(), 7u);
  EXPECT_EQ(s.val.size() + s.test.size(), 3u);
  EXPECT_EQ(std::set<std::size_t>({s.val.size(), s.test.size()}), (std::set<std::size_t>{1, 2}));
}

TEST(StratifiedSplit, InsufficientClassThrows) {
  auto corpus = synthetic::corpus_with_class_counts(2, 10, 10);
  EXPECT_THROW(stratified_split(corpus, SplitSpec{}), InsufficientClass);
}

TEST(StratifiedSplit, ClassCountsOfPublishedDistribution) {
  auto corpus = synthetic::corpus_with_class_counts(2082, 5535, 1607);
  auto s = stratified_split(corpus, SplitSpec{});
  // 0.15 x (2082, 5535, 1607) = 312.3, 830.25, 241.05
  EXPECT_EQ(class_counts(corpus, s.test), (std::array<std::size_t, 3>{312, 830, 241}));
  EXPECT_EQ(class_counts(corpus, s.val), (std::array<std::size_t, 3>{312, 830, 241}));
  EXPECT_EQ(class_counts(corpus, s.train), (std::array<std::size_t, 3>{1458, 3875, 1125}));
}

}  // namespace
}  // namespace mistriage
