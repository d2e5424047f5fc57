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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mistriage {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kClsId = 2;
inline constexpr TokenId kSepId = 3;
inline constexpr TokenId kNumSpecials = 4;
inline constexpr std::string_view kContinuationPrefix = "##";

// Subword vocabulary. Ids 0..3 are [PAD] [UNK] [CLS] [SEP]; every other token
// is either word-initial or starts with "##".
class Vocab {
 public:
  // Specials followed by `tokens` in order. Duplicates are dropped.
  static Vocab from_tokens(const std::vector<std::string>& tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  // Looks up non-special tokens only; a corpus word spelled "[CLS]" must not
  // alias the special.
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Settings recorded in the file header (trainer options, corpus hash).
  std::map<std::string, std::string> metadata;

  // One token per line after a "# end" terminated header block.
  std::string serialize() const;
  static Vocab parse(std::string_view text);

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

struct TrainerOptions {
  std::size_t target_size = 8000;
};

// Merge-based vocabulary induction over whitespace-separated words. Starts
// from specials plus every positional single character, then repeatedly adds
// the most frequent adjacent symbol pair (ties: lexicographically smaller
// merged string) until target_size is reached or no pair occurs twice.
// Throws InvalidArgument when target_size is below the base alphabet + 4.
Vocab train_vocab(std::span<const std::string> corpus, const TrainerOptions& options);

// Distinct positional base symbols ("x" word-initially, "##x" elsewhere).
std::size_t base_alphabet_size(std::span<const std::string> corpus);

// Greedy longest-match-first per word. A word with an unmatchable piece
// becomes a single [UNK].
std::vector<TokenId> encode(std::string_view text, const Vocab& vocab);
std::vector<TokenId> encode_word(std::string_view word, const Vocab& vocab);

// Inverse of encode for fully covered text; specials are dropped. Throws
// InvalidArgument on an out-of-range id.
std::string decode(std::span<const TokenId> ids, const Vocab& vocab);

}  // namespace mistriage
