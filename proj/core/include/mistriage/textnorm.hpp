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

// Unicode normalization for Dari/Persian text ahead of tokenization.
//
// A normalized string is NFC, uses Persian yeh/kaf in place of the Arabic
// letter forms, carries ASCII digits only, keeps U+200C (ZWNJ) untouched,
// contains none of the table's stripped characters or any C0/C1 control, and
// has single spaces between words with no leading or trailing space.

#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mistriage {

inline constexpr char32_t kZwnj = 0x200C;

enum class DigitPolicy { kToAscii };

struct NormalizationTable {
  std::map<char32_t, std::u32string> char_map;
  std::set<char32_t> strip_set;
  DigitPolicy digit_policy = DigitPolicy::kToAscii;
  // SHA-256 of the serialized table; recorded in downstream reports.
  std::string version;

  // Parses `from<TAB>to` lines (code points as U+XXXX, `to` space separated,
  // empty `to` = strip). Rejects tables that map a code point twice or whose
  // outputs are themselves rewritten, since either breaks idempotence.
  static NormalizationTable parse(std::string_view tsv);
  static NormalizationTable load(const std::string& path);

  // The table compiled in from core/data/normalization.tsv.
  static const NormalizationTable& bundled();
};

class TextNormalizer {
 public:
  explicit TextNormalizer(NormalizationTable table);

  std::string normalize(std::string_view utf8) const;
  const NormalizationTable& table() const { return table_; }

 private:
  std::u32string rewrite(const std::u32string& text) const;

  NormalizationTable table_;
};

// Normalizes with the bundled table.
std::string normalize_text(std::string_view utf8);

bool is_valid_utf8(std::string_view bytes);

// Splits UTF-8 into one string per code point. Input must be valid UTF-8.
std::vector<std::string> utf8_chars(std::string_view utf8);

}  // namespace mistriage
