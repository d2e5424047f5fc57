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

// Model inputs built from a title and an optional description.
//
// Pair layout:    [CLS] title [SEP] description [SEP]   type ids 0..0 1..1
// Title only:     [CLS] title [SEP]                      type ids all 0
// Single concat:  [CLS] title description [SEP]          type ids all 0
//
// Every sequence is padded with [PAD] to exactly max_len; the attention mask
// is 1 on real tokens and 0 on padding.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mistriage/corpus.hpp"
#include "mistriage/tokenizer.hpp"

namespace mistriage {

enum class EncodingArm { kPair, kSingle };

std::string_view to_string(EncodingArm arm);
EncodingArm parse_encoding_arm(std::string_view name);

inline constexpr std::size_t kMinMaxLen = 8;
inline constexpr std::size_t kTitleFloor = 8;

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<int> type_ids;
  std::vector<int> attention_mask;
  std::optional<InfoLabel> label;

  std::size_t length() const { return ids.size(); }
  bool operator==(const TokenSequence&) const = default;
};

// Both throw InvalidArgument for an empty title or max_len < 8.
//
// Pair truncation removes one token at a time from the end of the longer
// segment; on a tie the description gives way. The title is never cut below
// min(|title|, 8) while description tokens remain.
TokenSequence encode_pair(std::string_view title, std::optional<std::string_view> description,
                          const Vocab& vocab, std::size_t max_len);
// Tail truncation of the concatenated content.
TokenSequence encode_single(std::string_view title,
                            std::optional<std::string_view> description, const Vocab& vocab,
                            std::size_t max_len);

// Token-level entry points shared by the text versions and by tests that
// work with synthetic id streams.
TokenSequence assemble_pair(std::vector<TokenId> title, std::vector<TokenId> description,
                            std::size_t max_len);
TokenSequence assemble_single(std::vector<TokenId> title, std::vector<TokenId> description,
                              std::size_t max_len);

TokenSequence encode_record(const VideoRecord& record, const Vocab& vocab, std::size_t max_len,
                            EncodingArm arm);

// Checks the layout invariants; returns a description of the first violation.
std::optional<std::string> check_invariants(const TokenSequence& seq, std::size_t max_len);

// Line-delimited debug dump: {"ids":[...],"type_ids":[...],"attention_mask":[...],"label":k}
std::string dump_sequences(const std::vector<TokenSequence>& batch);
std::vector<TokenSequence> load_sequences(std::string_view text);

}  // namespace mistriage
