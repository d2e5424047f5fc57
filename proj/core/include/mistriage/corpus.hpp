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

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mistriage/textnorm.hpp"

namespace mistriage {

inline constexpr std::size_t kNumClasses = 3;

// Integer codes are the confusion-matrix axes and must not be reordered.
enum class InfoLabel : std::uint8_t { kMisinformation = 0, kPartlyTrue = 1, kTrue = 2 };
enum class HarmLabel : std::uint8_t { kLow = 0, kMedium = 1, kHigh = 2 };

inline constexpr std::array<InfoLabel, kNumClasses> kInfoLabels = {
    InfoLabel::kMisinformation, InfoLabel::kPartlyTrue, InfoLabel::kTrue};
inline constexpr std::array<HarmLabel, kNumClasses> kHarmLabels = {
    HarmLabel::kLow, HarmLabel::kMedium, HarmLabel::kHigh};

constexpr std::size_t index(InfoLabel l) { return static_cast<std::size_t>(l); }
constexpr std::size_t index(HarmLabel l) { return static_cast<std::size_t>(l); }

std::string_view to_string(InfoLabel label);
std::string_view to_string(HarmLabel label);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  // Accepts "YYYY-MM-DD", optionally followed by a "T..." time part.
  // Years outside 2005..2100 are rejected.
  static std::optional<Date> parse_iso(std::string_view text);
  std::string iso() const;
  auto operator<=>(const Date&) const = default;
};

struct VideoRecord {
  std::string title;  // normalized
  std::string url;
  std::string channel;
  Date publish_date;
  std::optional<std::string> description;  // normalized; absent when empty
  std::optional<InfoLabel> info_type;      // absent when the raw label is unknown
  std::optional<HarmLabel> harm_level;
  std::string raw_info;
  std::string raw_harm;

  bool operator==(const VideoRecord&) const = default;
};

struct RowError {
  std::size_t row = 0;  // 1-based data row (header excluded)
  std::string reason;
};

enum class LabelAxis { kInfo, kHarm };

// Variant spellings of the two label axes. Keys are case folded with all
// whitespace and punctuation removed before lookup.
class LabelSynonyms {
 public:
  // Lines: <axis><TAB><canonical><TAB><variant>; '#' starts a comment.
  static LabelSynonyms parse(std::string_view tsv);
  static LabelSynonyms load(const std::string& path);
  static const LabelSynonyms& bundled();

  std::optional<InfoLabel> find_info(std::string_view raw) const;
  std::optional<HarmLabel> find_harm(std::string_view raw) const;
  const std::string& version() const { return version_; }

  static std::string canonical_key(std::string_view raw);

 private:
  std::map<std::string, InfoLabel> info_;
  std::map<std::string, HarmLabel> harm_;
  std::string version_;
};

// Throws UnknownLabel when the raw text matches no synonym.
std::variant<InfoLabel, HarmLabel> normalize_label(
    std::string_view raw, LabelAxis axis,
    const LabelSynonyms& synonyms = LabelSynonyms::bundled());
InfoLabel normalize_info_label(std::string_view raw,
                               const LabelSynonyms& synonyms = LabelSynonyms::bundled());
HarmLabel normalize_harm_label(std::string_view raw,
                               const LabelSynonyms& synonyms = LabelSynonyms::bundled());

inline constexpr std::array<std::string_view, 7> kCorpusFields = {
    "title", "url", "channel", "publish_date", "description", "info_type", "harm_level"};

struct ParseResult {
  std::vector<VideoRecord> records;
  std::vector<RowError> errors;
};

// Parses CSV (header must equal kCorpusFields) or JSON Lines; the format is
// chosen by sniffing the first non-blank byte. Rows with unknown labels are
// kept with the label absent so cleaning can count them.
ParseResult parse_records(std::string_view text,
                          const LabelSynonyms& synonyms = LabelSynonyms::bundled(),
                          const TextNormalizer* normalizer = nullptr);
ParseResult read_records(const std::string& path,
                         const LabelSynonyms& synonyms = LabelSynonyms::bundled(),
                         const TextNormalizer* normalizer = nullptr);

// Records whose URLs are unique and whose two labels are both present.
class CleanCorpus {
 public:
  CleanCorpus() = default;
  const std::vector<VideoRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const VideoRecord& operator[](std::size_t i) const { return records_[i]; }
  InfoLabel info(std::size_t i) const { return *records_[i].info_type; }
  HarmLabel harm(std::size_t i) const { return *records_[i].harm_level; }

  // Validates the invariants; throws InvalidArgument if any record fails.
  static CleanCorpus from_records(std::vector<VideoRecord> records);

 private:
  explicit CleanCorpus(std::vector<VideoRecord> records) : records_(std::move(records)) {}
  std::vector<VideoRecord> records_;
};

struct CleanStats {
  std::size_t input = 0;
  std::size_t duplicate_urls = 0;
  std::size_t invalid_labels = 0;  // records removed for an unknown label
  std::size_t invalid_info = 0;    // of those, unknown on the info axis
  std::size_t invalid_harm = 0;    // of those, unknown on the harm axis
  std::size_t retained = 0;

  nlohmann::json to_json() const;
};

struct CleanResult {
  CleanCorpus corpus;
  CleanStats stats;
};

// Drops repeated URLs (first occurrence wins), then records lacking a valid
// label on either axis. Throws EmptyCorpus when nothing remains.
CleanResult clean_corpus(std::vector<VideoRecord> records);

std::string write_corpus_csv(const std::vector<VideoRecord>& records);

struct SplitSpec {
  std::array<double, 3> ratios = {0.70, 0.15, 0.15};  // train, val, test
  std::uint64_t seed = 0;

  void validate() const;
};

// Indices into the corpus, ascending within each split.
struct Splits {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;

  bool operator==(const Splits&) const = default;
};

// Per-class integer quotas by largest remainder; ties in the fractional part
// go to the earlier split (train, then val, then test).
std::array<std::size_t, 3> largest_remainder_quotas(std::size_t n,
                                                    const std::array<double, 3>& ratios);

// Stratified on the information-type label. Classes that are present need at
// least three members (InsufficientClass otherwise); absent classes are fine.
Splits stratified_split(const CleanCorpus& corpus, const SplitSpec& spec);

// Per-class member counts of a subset of the corpus.
std::array<std::size_t, kNumClasses> class_counts(const CleanCorpus& corpus,
                                                  const std::vector<std::size_t>& subset);

}  // namespace mistriage
