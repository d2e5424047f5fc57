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

#include "mistriage/textnorm.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <charconv>

#include "bundled_tables.hpp"
#include "mistriage/error.hpp"
#include "mistriage/hashing.hpp"

namespace mistriage {
namespace {

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw Error("ICU NFC normalizer unavailable");
  }
  return *n;
}

std::u32string to_u32(const icu::UnicodeString& s) {
  std::u32string out;
  out.reserve(static_cast<std::size_t>(s.length()));
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

icu::UnicodeString from_u32(const std::u32string& s) {
  return icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(s.data()),
                                       static_cast<int32_t>(s.size()));
}

std::u32string nfc_u32(const std::u32string& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc().normalize(from_u32(s), status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return to_u32(out);
}

std::string to_utf8(const std::u32string& s) {
  std::string out;
  from_u32(s).toUTF8String(out);
  return out;
}

char32_t parse_code_point(std::string_view token, std::size_t line) {
  if (token.size() < 3 || token[0] != 'U' || token[1] != '+') {
    throw ParseError("normalization table line " + std::to_string(line) +
                     ": expected U+XXXX, got \"" + std::string(token) + "\"");
  }
  unsigned value = 0;
  const char* first = token.data() + 2;
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value, 16);
  if (ec != std::errc{} || ptr != last || value > 0x10FFFF) {
    throw ParseError("normalization table line " + std::to_string(line) +
                     ": bad code point \"" + std::string(token) + "\"");
  }
  return static_cast<char32_t>(value);
}

}  // namespace

NormalizationTable NormalizationTable::parse(std::string_view tsv) {
  NormalizationTable table;
  table.version = sha256_hex(tsv);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= tsv.size()) {
    std::size_t eol = tsv.find('\n', pos);
    if (eol == std::string_view::npos) eol = tsv.size();
    std::string_view line = tsv.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("normalization table line " + std::to_string(line_no) +
                       ": missing tab");
    }
    const char32_t from = parse_code_point(line.substr(0, tab), line_no);
    if (table.char_map.contains(from) || table.strip_set.contains(from)) {
      throw ParseError("normalization table line " + std::to_string(line_no) +
                       ": code point mapped twice");
    }
    std::u32string to;
    std::string_view rest = line.substr(tab + 1);
    while (!rest.empty()) {
      const std::size_t sp = rest.find(' ');
      std::string_view tok = rest.substr(0, sp);
      if (!tok.empty()) to.push_back(parse_code_point(tok, line_no));
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    if (to.empty()) {
      table.strip_set.insert(from);
    } else {
      table.char_map.emplace(from, std::move(to));
    }
  }
  for (const auto& [from, to] : table.char_map) {
    for (char32_t c : to) {
      if (table.char_map.contains(c) || table.strip_set.contains(c)) {
        throw ParseError("normalization table is not idempotent: output of "
                         "a mapping is itself rewritten");
      }
    }
  }
  return table;
}

NormalizationTable NormalizationTable::load(const std::string& path) {
  return parse(read_file(path));
}

const NormalizationTable& NormalizationTable::bundled() {
  static const NormalizationTable table = parse(bundled::kNormalizationTable);
  return table;
}

TextNormalizer::TextNormalizer(NormalizationTable table)
    : table_(std::move(table)) {}

std::u32string TextNormalizer::rewrite(const std::u32string& text) const {
  std::u32string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (table_.strip_set.contains(c)) continue;
    if (auto it = table_.char_map.find(c); it != table_.char_map.end()) {
      out += it->second;
      continue;
    }
    const auto uc = static_cast<UChar32>(c);
    if (c > 0x7F && u_charType(uc) == U_DECIMAL_DIGIT_NUMBER) {
      const int32_t digit = u_charDigitValue(uc);
      if (digit >= 0 && digit <= 9) {
        out.push_back(U'0' + static_cast<char32_t>(digit));
        continue;
      }
    }
    if (u_isUWhiteSpace(uc)) {
      out.push_back(U' ');
    } else if (u_charType(uc) == U_CONTROL_CHAR) {
      continue;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string TextNormalizer::normalize(std::string_view utf8) const {
  icu::UnicodeString decoded = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::u32string text = to_u32(decoded);

  // Stripping can bring a base letter next to a combining mark, so compose
  // and rewrite until nothing changes. Converges in two passes in practice.
  text = nfc_u32(text);
  for (int pass = 0; pass < 8; ++pass) {
    std::u32string next = nfc_u32(rewrite(text));
    if (next == text) break;
    text = std::move(next);
  }

  std::u32string collapsed;
  collapsed.reserve(text.size());
  bool pending_space = false;
  for (char32_t c : text) {
    if (c == U' ') {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(U' ');
    pending_space = false;
    collapsed.push_back(c);
  }
  return to_utf8(collapsed);
}

std::string normalize_text(std::string_view utf8) {
  static const TextNormalizer normalizer(NormalizationTable::bundled());
  return normalizer.normalize(utf8);
}

bool is_valid_utf8(std::string_view bytes) {
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::vector<std::string> utf8_chars(std::string_view utf8) {
  std::vector<std::string> out;
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.emplace_back(utf8.substr(static_cast<std::size_t>(start),
                                 static_cast<std::size_t>(i - start)));
  }
  return out;
}

}  // namespace mistriage
