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


#include "mistriage/tokenizer.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mistriage/error.hpp"

namespace mistriage {
namespace {

std::vector<std::string> pieces(const std::vector<TokenId>& ids, const Vocab& v) {
  std::vector<std::string> out;
  for (auto id : ids) out.push_back(v.token(id));
  return out;
}

std::size_t unk_count(const std::vector<std::string>& corpus, const Vocab& v) {
  std::size_t n = 0;
  for (const auto& line : corpus) {
    auto ids = encode(line, v);
    n += static_cast<std::size_t>(std::count(ids.begin(), ids.end(), kUnkId));
  }
  return n;
}

TEST(Vocab, SpecialsAndLookup) {
  auto v = Vocab::from_tokens({"a", "##b", "a"});
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v.token(kPadId), "[PAD]");
  EXPECT_EQ(v.token(kUnkId), "[UNK]");
  EXPECT_EQ(v.token(kClsId), "[CLS]");
  EXPECT_EQ(v.token(kSepId), "[SEP]");
  EXPECT_EQ(v.find("a"), 4);
  EXPECT_EQ(v.find("##b"), 5);
  EXPECT_FALSE(v.find("[CLS]"));
}

TEST(Vocab, SerializeParseRoundTrip) {
  auto v = Vocab::from_tokens({"ab", "##c", "خبر", "##‌ها"});
  v.metadata["target_size"] = "64";
  v.metadata["corpus_sha256"] = "abc";
  auto text = v.serialize();
  auto back = Vocab::parse(text);
  EXPECT_EQ(back, v);
  EXPECT_EQ(back.metadata, v.metadata);
  EXPECT_EQ(back.serialize(), text);
}

TEST(Vocab, ParseRejectsMissingSpecials) {
  EXPECT_THROW(Vocab::parse("# end\na\nb\n"), ParseError);
}

TEST(TrainVocab, MostFrequentPairMerged) {
  const std::vector<std::string> corpus = {"ab ab ab", "b"};
  auto v = train_vocab(corpus, {64});
  EXPECT_TRUE(v.contains("ab"));
}

TEST(TrainVocab, MinimumTargetGivesBaseAlphabetOnly) {
  const std::vector<std::string> corpus = {"ab ab ab", "b"};
  const auto base = base_alphabet_size(corpus);
  EXPECT_EQ(base, 3u);  // a, ##b, b
  auto v = train_vocab(corpus, {base + 4});
  EXPECT_EQ(v.size(), base + 4);
  EXPECT_FALSE(v.contains("ab"));
  EXPECT_THROW(train_vocab(corpus, {base + 3}), InvalidArgument);
}

TEST(TrainVocab, TieGoesToLexicographicallySmallerMerge) {
  // "xy" and "ab" both occur twice; "ab" < "xy".
  const std::vector<std::string> corpus = {"xy ab", "ab xy"};
  const auto base = base_alphabet_size(corpus);
  auto v = train_vocab(corpus, {base + 4 + 1});
  EXPECT_TRUE(v.contains("ab"));
  EXPECT_FALSE(v.contains("xy"));
}

TEST(TrainVocab, StopsWhenNoPairRepeats) {
  const std::vector<std::string> corpus = {"abc"};
  auto v = train_vocab(corpus, {1000});
  EXPECT_EQ(v.size(), base_alphabet_size(corpus) + 4);
}

TEST(TrainVocab, Deterministic) {
  const std::vector<std::string> corpus = {"the cat sat", "the hat", "that cat", "خبر فوری خبر"};
  EXPECT_EQ(train_vocab(corpus, {40}).serialize(), train_vocab(corpus, {40}).serialize());
}

TEST(TrainVocab, TokensAreWordInitialOrContinuation) {
  const std::vector<std::string> corpus = {"the cat sat on the mat", "a cat", "mat mat"};
  auto v = train_vocab(corpus, {60});
  for (std::size_t id = kNumSpecials; id < v.size(); ++id) {
    const auto& t = v.token(static_cast<TokenId>(id));
    ASSERT_FALSE(t.empty());
    if (t.starts_with("##")) {
      ASSERT_GT(t.size(), 2u);
    }
  }
}

TEST(TrainVocab, CoverageMonotoneInTargetSize) {
  const std::vector<std::string> corpus = {"alpha beta gamma", "beta delta", "gamma alpha alpha",
                                           "epsilon", "zeta eta theta"};
  std::size_t previous = SIZE_MAX;
  for (std::size_t target = base_alphabet_size(corpus) + 4; target < 120; target += 5) {
    const auto unk = unk_count(corpus, train_vocab(corpus, {target}));
    EXPECT_LE(unk, previous);
    previous = unk;
  }
}

TEST(Encode, WholeWordInVocab) {
  auto v = Vocab::from_tokens({"abc", "a"});
  EXPECT_EQ(encode("abc", v), (std::vector<TokenId>{*v.find("abc")}));
}

TEST(Encode, GreedyLongestMatch) {
  auto v = Vocab::from_tokens({"a", "b", "c", "ab", "##c"});
  EXPECT_EQ(pieces(encode("abc", v), v), (std::vector<std::string>{"ab", "##c"}));
}

TEST(Encode, UnmatchableWordBecomesSingleUnk) {
  auto v = Vocab::from_tokens({"a", "##b"});
  EXPECT_EQ(encode("abz a", v), (std::vector<TokenId>{kUnkId, *v.find("a")}));
  EXPECT_EQ(encode_word("zz", v), (std::vector<TokenId>{kUnkId}));
}

TEST(Encode, ZwnjIsWordInternal) {
  const std::string word = "می‌رود";
  const std::vector<std::string> corpus = {word, word};
  auto v = train_vocab(corpus, {200});
  auto ids = encode(word, v);
  EXPECT_EQ(ids.size(), 1u);
  EXPECT_EQ(decode(ids, v), word);
}

TEST(Decode, JoinsPiecesAndDropsSpecials) {
  auto v = Vocab::from_tokens({"ab", "##c", "x"});
  const std::vector<TokenId> abc = {*v.find("ab"), *v.find("##c")};
  EXPECT_EQ(decode(abc, v), "abc");
  const std::vector<TokenId> framed = {kClsId, *v.find("x"), kSepId};
  EXPECT_EQ(decode(framed, v), "x");
  EXPECT_EQ(decode(std::vector<TokenId>{}, v), "");
  const std::vector<TokenId> bad = {static_cast<TokenId>(v.size())};
  EXPECT_THROW(decode(bad, v), InvalidArgument);
}

TEST(Decode, RoundTripOnTrainingText) {
  const std::vector<std::string> corpus = {"the quick brown fox", "jumps over the lazy dog",
                                           "خبر فوری امروز", "the dog"};
  auto v = train_vocab(corpus, {80});
  for (const auto& line : corpus) EXPECT_EQ(decode(encode(line, v), v), line);
}

}  // namespace
}  // namespace mistriage
