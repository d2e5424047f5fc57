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

#include "mistriage/corpus.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "bundled_tables.hpp"
#include "mistriage/csv.hpp"
#include "mistriage/error.hpp"
#include "mistriage/hashing.hpp"
#include "mistriage/rng.hpp"

namespace mistriage {

std::string_view to_string(InfoLabel label) {
  switch (label) {
    case InfoLabel::kMisinformation:
      return "Misinformation";
    case InfoLabel::kPartlyTrue:
      return "Partly True";
    case InfoLabel::kTrue:
      return "True";
  }
  return "?";
}

std::string_view to_string(HarmLabel label) {
  switch (label) {
    case HarmLabel::kLow:
      return "Low";
    case HarmLabel::kMedium:
      return "Medium";
    case HarmLabel::kHigh:
      return "High";
  }
  return "?";
}

// ---------------------------------------------------------------- Date

namespace {

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::optional<Date> Date::parse_iso(std::string_view text) {
  text = trim(text);
  if (text.size() > 10) {
    if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
    text = text.substr(0, 10);
  }
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = parse_int(text.substr(0, 4));
  auto m = parse_int(text.substr(5, 2));
  auto d = parse_int(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                        std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok() || *y < 2005 || *y > 2100) return std::nullopt;
  return Date{*y, *m, *d};
}

std::string Date::iso() const { return fmt::format("{:04d}-{:02d}-{:02d}", year, month, day); }

// ---------------------------------------------------------------- labels

std::string LabelSynonyms::canonical_key(std::string_view raw) {
  const std::string normalized = normalize_text(raw);
  icu::UnicodeString folded = icu::UnicodeString::fromUTF8(
      icu::StringPiece(normalized.data(), static_cast<int32_t>(normalized.size())));
  folded.foldCase();
  icu::UnicodeString key;
  for (int32_t i = 0; i < folded.length();) {
    const UChar32 c = folded.char32At(i);
    i += U16_LENGTH(c);
    const auto type = u_charType(c);
    if (u_isUWhiteSpace(c) || u_ispunct(c) || type == U_FORMAT_CHAR ||
        type == U_CONTROL_CHAR) {
      continue;
    }
    key.append(c);
  }
  std::string out;
  key.toUTF8String(out);
  return out;
}

LabelSynonyms LabelSynonyms::parse(std::string_view tsv) {
  LabelSynonyms table;
  table.version_ = sha256_hex(tsv);
  const auto rows = csv::parse(tsv, '\t');
  for (const auto& row : rows) {
    if (row.fields.empty() || row.fields[0].starts_with('#')) continue;
    if (row.fields.size() != 3) {
      throw ParseError(fmt::format("label table line {}: expected 3 fields", row.line));
    }
    const std::string& axis = row.fields[0];
    const std::string& canonical = row.fields[1];
    const std::string key = canonical_key(row.fields[2]);
    if (key.empty()) {
      throw ParseError(fmt::format("label table line {}: empty variant", row.line));
    }
    if (axis == "info") {
      InfoLabel label;
      if (canonical == "misinformation") {
        label = InfoLabel::kMisinformation;
      } else if (canonical == "partly_true") {
        label = InfoLabel::kPartlyTrue;
      } else if (canonical == "true") {
        label = InfoLabel::kTrue;
      } else {
        throw ParseError(fmt::format("label table line {}: unknown class {}", row.line,
                                     canonical));
      }
      auto [it, inserted] = table.info_.emplace(key, label);
      if (!inserted && it->second != label) {
        throw ParseError(fmt::format("label table line {}: conflicting variant", row.line));
      }
    } else if (axis == "harm") {
      HarmLabel label;
      if (canonical == "low") {
        label = HarmLabel::kLow;
      } else if (canonical == "medium") {
        label = HarmLabel::kMedium;
      } else if (canonical == "high") {
        label = HarmLabel::kHigh;
      } else {
        throw ParseError(fmt::format("label table line {}: unknown level {}", row.line,
                                     canonical));
      }
      auto [it, inserted] = table.harm_.emplace(key, label);
      if (!inserted && it->second != label) {
        throw ParseError(fmt::format("label table line {}: conflicting variant", row.line));
      }
    } else {
      throw ParseError(fmt::format("label table line {}: unknown axis {}", row.line, axis));
    }
  }
  return table;
}

LabelSynonyms LabelSynonyms::load(const std::string& path) { return parse(read_file(path)); }

const LabelSynonyms& LabelSynonyms::bundled() {
  static const LabelSynonyms table = parse(bundled::kLabelSynonyms);
  return table;
}

std::optional<InfoLabel> LabelSynonyms::find_info(std::string_view raw) const {
  if (auto it = info_.find(canonical_key(raw)); it != info_.end()) return it->second;
  return std::nullopt;
}

std::optional<HarmLabel> LabelSynonyms::find_harm(std::string_view raw) const {
  if (auto it = harm_.find(canonical_key(raw)); it != harm_.end()) return it->second;
  return std::nullopt;
}

std::variant<InfoLabel, HarmLabel> normalize_label(std::string_view raw, LabelAxis axis,
                                                   const LabelSynonyms& synonyms) {
  if (axis == LabelAxis::kInfo) return normalize_info_label(raw, synonyms);
  return normalize_harm_label(raw, synonyms);
}

InfoLabel normalize_info_label(std::string_view raw, const LabelSynonyms& synonyms) {
  if (auto label = synonyms.find_info(raw)) return *label;
  throw UnknownLabel(std::string(raw));
}

HarmLabel normalize_harm_label(std::string_view raw, const LabelSynonyms& synonyms) {
  if (auto label = synonyms.find_harm(raw)) return *label;
  throw UnknownLabel(std::string(raw));
}

// ---------------------------------------------------------------- parsing

namespace {

struct RawFields {
  std::string title, url, channel, publish_date, description, info_type, harm_level;
};

// Returns an error reason, or nothing when the row yields a record.
std::optional<std::string> build_record(const RawFields& raw, const LabelSynonyms& synonyms,
                                        const TextNormalizer* normalizer, VideoRecord& out) {
  for (const std::string* field : {&raw.title, &raw.url, &raw.channel, &raw.publish_date,
                                   &raw.description, &raw.info_type, &raw.harm_level}) {
    if (!is_valid_utf8(*field)) return "invalid UTF-8";
  }
  auto norm = [&](std::string_view s) {
    return normalizer ? normalizer->normalize(s) : normalize_text(s);
  };
  out.title = norm(raw.title);
  if (out.title.empty()) return "missing title";
  out.url = std::string(trim(raw.url));
  if (out.url.empty()) return "missing url";
  out.channel = norm(raw.channel);
  auto date = Date::parse_iso(raw.publish_date);
  if (!date) return "invalid publish_date \"" + raw.publish_date + "\"";
  out.publish_date = *date;
  std::string description = norm(raw.description);
  if (!description.empty()) out.description = std::move(description);
  out.raw_info = raw.info_type;
  out.raw_harm = raw.harm_level;
  out.info_type = synonyms.find_info(raw.info_type);
  out.harm_level = synonyms.find_harm(raw.harm_level);
  return std::nullopt;
}

ParseResult parse_csv(std::string_view text, const LabelSynonyms& synonyms,
                      const TextNormalizer* normalizer) {
  ParseResult result;
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  auto rows = csv::parse(text, ',');
  if (rows.empty()) return result;

  const auto& header = rows.front().fields;
  bool header_ok = header.size() == kCorpusFields.size();
  for (std::size_t i = 0; header_ok && i < header.size(); ++i) {
    header_ok = trim(header[i]) == kCorpusFields[i];
  }
  if (!header_ok) {
    throw ParseError(
        "corpus header must be exactly "
        "title,url,channel,publish_date,description,info_type,harm_level");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.unterminated_quote) {
      result.errors.push_back({r, "unterminated quoted field"});
      continue;
    }
    if (row.fields.size() != kCorpusFields.size()) {
      result.errors.push_back(
          {r, fmt::format("expected {} fields, found {}", kCorpusFields.size(),
                          row.fields.size())});
      continue;
    }
    const auto& f = row.fields;
    RawFields raw{f[0], f[1], f[2], f[3], f[4], f[5], f[6]};
    VideoRecord record;
    if (auto err = build_record(raw, synonyms, normalizer, record)) {
      result.errors.push_back({r, *err});
    } else {
      result.records.push_back(std::move(record));
    }
  }
  return result;
}

ParseResult parse_jsonl(std::string_view text, const LabelSynonyms& synonyms,
                        const TextNormalizer* normalizer) {
  ParseResult result;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;
    ++row;

    nlohmann::json obj = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
      result.errors.push_back({row, "malformed JSON object"});
      continue;
    }
    std::optional<std::string> error;
    for (const auto& [key, value] : obj.items()) {
      if (std::find(kCorpusFields.begin(), kCorpusFields.end(), key) == kCorpusFields.end()) {
        error = "unexpected field \"" + key + "\"";
        break;
      }
    }
    RawFields raw;
    std::array<std::string*, 7> slots = {&raw.title,        &raw.url,         &raw.channel,
                                         &raw.publish_date, &raw.description, &raw.info_type,
                                         &raw.harm_level};
    for (std::size_t i = 0; !error && i < kCorpusFields.size(); ++i) {
      const std::string key(kCorpusFields[i]);
      if (!obj.contains(key) || obj[key].is_null()) {
        if (key == "description") continue;
        if (key == "title") {
          error = "missing title";
        } else {
          error = "missing field \"" + key + "\"";
        }
      } else if (!obj[key].is_string()) {
        error = "field \"" + key + "\" is not a string";
      } else {
        *slots[i] = obj[key].get<std::string>();
      }
    }
    VideoRecord record;
    if (!error) error = build_record(raw, synonyms, normalizer, record);
    if (error) {
      result.errors.push_back({row, *error});
    } else {
      result.records.push_back(std::move(record));
    }
  }
  return result;
}

}  // namespace

ParseResult parse_records(std::string_view text, const LabelSynonyms& synonyms,
                          const TextNormalizer* normalizer) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    return parse_jsonl(text, synonyms, normalizer);
  }
  return parse_csv(text, synonyms, normalizer);
}

ParseResult read_records(const std::string& path, const LabelSynonyms& synonyms,
                         const TextNormalizer* normalizer) {
  return parse_records(read_file(path), synonyms, normalizer);
}

// ---------------------------------------------------------------- cleaning

CleanCorpus CleanCorpus::from_records(std::vector<VideoRecord> records) {
  std::unordered_set<std::string> urls;
  for (const auto& r : records) {
    if (r.title.empty()) throw InvalidArgument("record with empty title");
    if (!r.info_type || !r.harm_level) {
      throw InvalidArgument("record " + r.url + " lacks a valid label");
    }
    if (!urls.insert(r.url).second) throw InvalidArgument("duplicate url " + r.url);
  }
  return CleanCorpus(std::move(records));
}

nlohmann::json CleanStats::to_json() const {
  return {{"input", input},
          {"duplicate_urls", duplicate_urls},
          {"invalid_labels", invalid_labels},
          {"invalid_info", invalid_info},
          {"invalid_harm", invalid_harm},
          {"retained", retained}};
}

CleanResult clean_corpus(std::vector<VideoRecord> records) {
  CleanStats stats;
  stats.input = records.size();
  std::unordered_set<std::string> seen;
  std::vector<VideoRecord> kept;
  kept.reserve(records.size());
  for (auto& r : records) {
    if (!seen.insert(r.url).second) {
      ++stats.duplicate_urls;
      continue;
    }
    if (!r.info_type || !r.harm_level) {
      ++stats.invalid_labels;
      if (!r.info_type) ++stats.invalid_info;
      if (!r.harm_level) ++stats.invalid_harm;
      continue;
    }
    kept.push_back(std::move(r));
  }
  stats.retained = kept.size();
  if (kept.empty()) throw EmptyCorpus();
  return {CleanCorpus::from_records(std::move(kept)), stats};
}

std::string write_corpus_csv(const std::vector<VideoRecord>& records) {
  std::string out = csv::format_row({kCorpusFields.begin(), kCorpusFields.end()});
  for (const auto& r : records) {
    out += csv::format_row({r.title, r.url, r.channel, r.publish_date.iso(),
                            r.description.value_or(""),
                            r.info_type ? std::string(to_string(*r.info_type)) : r.raw_info,
                            r.harm_level ? std::string(to_string(*r.harm_level)) : r.raw_harm});
  }
  return out;
}

// ---------------------------------------------------------------- splitting

void SplitSpec::validate() const {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw InvalidArgument("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("split ratios must sum to 1");
}

std::array<std::size_t, 3> largest_remainder_quotas(std::size_t n,
                                                    const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> quota{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = ratios[s] * static_cast<double>(n);
    // 0.7 * 10 lands a hair under 7 in binary floating point.
    const double whole = std::floor(exact + 1e-9);
    quota[s] = static_cast<std::size_t>(whole);
    remainder[s] = std::max(0.0, exact - whole);
    assigned += quota[s];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b] + 1e-12;
  });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    ++quota[order[k]];
    ++assigned;
  }
  return quota;
}

Splits stratified_split(const CleanCorpus& corpus, const SplitSpec& spec) {
  spec.validate();
  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < corpus.size(); ++i) members[index(corpus.info(i))].push_back(i);

  Splits splits;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& m = members[c];
    if (m.empty()) continue;
    if (m.size() < 3) {
      throw InsufficientClass(fmt::format("class {} has {} member(s); at least 3 required",
                                          to_string(kInfoLabels[c]), m.size()));
    }
    Rng rng(derive_seed(spec.seed, "split", c));
    rng.shuffle(std::span<std::size_t>(m));
    const auto quota = largest_remainder_quotas(m.size(), spec.ratios);
    auto it = m.begin();
    splits.train.insert(splits.train.end(), it, it + static_cast<std::ptrdiff_t>(quota[0]));
    it += static_cast<std::ptrdiff_t>(quota[0]);
    splits.val.insert(splits.val.end(), it, it + static_cast<std::ptrdiff_t>(quota[1]));
    it += static_cast<std::ptrdiff_t>(quota[1]);
    splits.test.insert(splits.test.end(), it, m.end());
  }
  std::sort(splits.train.begin(), splits.train.end());
  std::sort(splits.val.begin(), splits.val.end());
  std::sort(splits.test.begin(), splits.test.end());
  return splits;
}

std::array<std::size_t, kNumClasses> class_counts(const CleanCorpus& corpus,
                                                  const std::vector<std::size_t>& subset) {
  std::array<std::size_t, kNumClasses> counts{};
  for (std::size_t i : subset) ++counts[index(corpus.info(i))];
  return counts;
}

}  // namespace mistriage
