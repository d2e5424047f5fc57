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

#include "mistriage/encoding.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mistriage/error.hpp"

namespace mistriage {

std::string_view to_string(EncodingArm arm) {
  return arm == EncodingArm::kPair ? "pair" : "single";
}

EncodingArm parse_encoding_arm(std::string_view name) {
  if (name == "pair") return EncodingArm::kPair;
  if (name == "single") return EncodingArm::kSingle;
  throw InvalidArgument(fmt::format("unknown encoding arm \"{}\" (pair|single)", name));
}

namespace {

void check_args(std::size_t title_tokens, std::size_t max_len) {
  if (title_tokens == 0) throw InvalidArgument("title is empty");
  if (max_len < kMinMaxLen) {
    throw InvalidArgument(fmt::format("max_len {} is below {}", max_len, kMinMaxLen));
  }
}

void pad_to(TokenSequence& seq, std::size_t max_len) {
  seq.attention_mask.assign(seq.ids.size(), 1);
  seq.ids.resize(max_len, kPadId);
  seq.type_ids.resize(max_len, 0);
  seq.attention_mask.resize(max_len, 0);
}

}  // namespace

TokenSequence assemble_pair(std::vector<TokenId> title, std::vector<TokenId> description,
                            std::size_t max_len) {
  check_args(title.size(), max_len);
  std::size_t m = title.size();
  std::size_t n = description.size();
  const std::size_t floor = std::min(m, kTitleFloor);
  while (n > 0 && m + n + 3 > max_len) {
    if (n >= m || m <= floor) {
      --n;
    } else {
      --m;
    }
  }
  // With the description gone the title alone must fit beside CLS and SEP.
  if (n == 0) m = std::min(m, max_len - 2);
  title.resize(m);
  description.resize(n);

  TokenSequence seq;
  seq.ids.reserve(max_len);
  seq.ids.push_back(kClsId);
  seq.ids.insert(seq.ids.end(), title.begin(), title.end());
  seq.ids.push_back(kSepId);
  seq.type_ids.assign(seq.ids.size(), 0);
  if (n > 0) {
    seq.ids.insert(seq.ids.end(), description.begin(), description.end());
    seq.ids.push_back(kSepId);
    seq.type_ids.resize(seq.ids.size(), 1);
  }
  pad_to(seq, max_len);
  return seq;
}

TokenSequence assemble_single(std::vector<TokenId> title, std::vector<TokenId> description,
                              std::size_t max_len) {
  check_args(title.size(), max_len);
  std::vector<TokenId> content = std::move(title);
  content.insert(content.end(), description.begin(), description.end());
  if (content.size() > max_len - 2) content.resize(max_len - 2);

  TokenSequence seq;
  seq.ids.reserve(max_len);
  seq.ids.push_back(kClsId);
  seq.ids.insert(seq.ids.end(), content.begin(), content.end());
  seq.ids.push_back(kSepId);
  seq.type_ids.assign(seq.ids.size(), 0);
  pad_to(seq, max_len);
  return seq;
}

TokenSequence encode_pair(std::string_view title, std::optional<std::string_view> description,
                          const Vocab& vocab, std::size_t max_len) {
  return assemble_pair(encode(title, vocab),
                       description ? encode(*description, vocab) : std::vector<TokenId>{},
                       max_len);
}

TokenSequence encode_single(std::string_view title,
                            std::optional<std::string_view> description, const Vocab& vocab,
                            std::size_t max_len) {
  return assemble_single(encode(title, vocab),
                         description ? encode(*description, vocab) : std::vector<TokenId>{},
                         max_len);
}

TokenSequence encode_record(const VideoRecord& record, const Vocab& vocab, std::size_t max_len,
                            EncodingArm arm) {
  std::optional<std::string_view> description;
  if (record.description) description = *record.description;
  TokenSequence seq = arm == EncodingArm::kPair
                          ? encode_pair(record.title, description, vocab, max_len)
                          : encode_single(record.title, description, vocab, max_len);
  seq.label = record.info_type;
  return seq;
}

std::optional<std::string> check_invariants(const TokenSequence& seq, std::size_t max_len) {
  const std::size_t len = seq.ids.size();
  if (seq.type_ids.size() != len || seq.attention_mask.size() != len) {
    return "list lengths differ";
  }
  if (len != max_len) return fmt::format("length {} != max_len {}", len, max_len);
  if (len == 0 || seq.ids[0] != kClsId) return "first id is not CLS";
  std::size_t real = 0;
  while (real < len && seq.ids[real] != kPadId) ++real;
  for (std::size_t i = real; i < len; ++i) {
    if (seq.ids[i] != kPadId) return "non-pad id after padding";
  }
  if (seq.ids[real - 1] != kSepId) return "last real id is not SEP";
  for (std::size_t i = 0; i < len; ++i) {
    if (seq.attention_mask[i] != (i < real ? 1 : 0)) return "mask does not match padding";
  }
  int seps = 0;
  for (std::size_t i = 0; i < real; ++i) {
    // Type 0 up to and including the first SEP, type 1 through the second.
    const int expected = seps == 0 ? 0 : 1;
    if (seq.type_ids[i] != expected) return fmt::format("bad type id at {}", i);
    if (seq.ids[i] == kSepId) ++seps;
  }
  if (seps < 1 || seps > 2) return fmt::format("{} SEP tokens", seps);
  for (std::size_t i = real; i < len; ++i) {
    if (seq.type_ids[i] != 0) return "padding with non-zero type id";
  }
  return std::nullopt;
}

std::string dump_sequences(const std::vector<TokenSequence>& batch) {
  std::string out;
  for (const auto& seq : batch) {
    nlohmann::json j = {
        {"ids", seq.ids}, {"type_ids", seq.type_ids}, {"attention_mask", seq.attention_mask}};
    j["label"] = seq.label ? nlohmann::json(static_cast<int>(*seq.label)) : nlohmann::json();
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<TokenSequence> load_sequences(std::string_view text) {
  std::vector<TokenSequence> batch;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    TokenSequence seq;
    seq.ids = j.at("ids").get<std::vector<TokenId>>();
    seq.type_ids = j.at("type_ids").get<std::vector<int>>();
    seq.attention_mask = j.at("attention_mask").get<std::vector<int>>();
    if (j.contains("label") && !j["label"].is_null()) {
      const int label = j["label"].get<int>();
      if (label < 0 || label >= static_cast<int>(kNumClasses)) {
        throw ParseError("label out of range in sequence dump");
      }
      seq.label = static_cast<InfoLabel>(label);
    }
    batch.push_back(std::move(seq));
  }
  return batch;
}

}  // namespace mistriage
