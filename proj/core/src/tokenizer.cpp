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
#include <queue>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

#include "mistriage/error.hpp"
#include "mistriage/textnorm.hpp"

namespace mistriage {
namespace {

constexpr std::array<std::string_view, kNumSpecials> kSpecialTokens = {"[PAD]", "[UNK]",
                                                                       "[CLS]", "[SEP]"};

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = text.find_first_not_of(" \t\n\r", pos);
    if (start == std::string_view::npos) break;
    std::size_t end = text.find_first_of(" \t\n\r", start);
    if (end == std::string_view::npos) end = text.size();
    words.push_back(text.substr(start, end - start));
    pos = end;
  }
  return words;
}

std::string strip_continuation(std::string_view s) {
  if (s.starts_with(kContinuationPrefix)) s.remove_prefix(kContinuationPrefix.size());
  return std::string(s);
}

// Word frequencies in first-seen order so symbol ids are deterministic.
std::vector<std::pair<std::string, std::int64_t>> count_words(
    std::span<const std::string> corpus) {
  std::vector<std::pair<std::string, std::int64_t>> counts;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& text : corpus) {
    for (auto w : split_words(text)) {
      auto [it, inserted] = slot.try_emplace(std::string(w), counts.size());
      if (inserted) counts.emplace_back(std::string(w), 0);
      ++counts[it->second].second;
    }
  }
  return counts;
}

}  // namespace

// ---------------------------------------------------------------- Vocab

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  Vocab v;
  for (auto s : kSpecialTokens) v.tokens_.emplace_back(s);
  for (const auto& t : tokens) {
    if (t.empty()) throw InvalidArgument("empty vocabulary token");
    if (std::find(kSpecialTokens.begin(), kSpecialTokens.end(), t) != kSpecialTokens.end()) {
      continue;
    }
    if (v.ids_.contains(t)) continue;
    v.ids_.emplace(t, static_cast<TokenId>(v.tokens_.size()));
    v.tokens_.push_back(t);
  }
  return v;
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw InvalidArgument(fmt::format("token id {} out of range [0, {})", id, tokens_.size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  return std::nullopt;
}

std::string Vocab::serialize() const {
  std::string out = "# mistriage vocab v1\n";
  for (const auto& [key, value] : metadata) out += fmt::format("# {}={}\n", key, value);
  out += "# end\n";
  for (const auto& t : tokens_) {
    out += t;
    out.push_back('\n');
  }
  return out;
}

Vocab Vocab::parse(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = eol + 1;
  }
  if (lines.empty() || lines[0] != "# mistriage vocab v1") {
    throw ParseError("not a mistriage vocab file");
  }
  std::size_t i = 1;
  std::map<std::string, std::string> metadata;
  for (; i < lines.size() && lines[i] != "# end"; ++i) {
    std::string_view entry = lines[i];
    if (!entry.starts_with("# ")) throw ParseError("malformed vocab header line");
    entry.remove_prefix(2);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) throw ParseError("malformed vocab header line");
    metadata.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  if (i == lines.size()) throw ParseError("vocab header is not terminated");
  ++i;
  std::vector<std::string> tokens;
  for (; i < lines.size(); ++i) tokens.emplace_back(lines[i]);
  if (tokens.size() < kNumSpecials) throw ParseError("vocab lacks special tokens");
  for (std::size_t s = 0; s < kNumSpecials; ++s) {
    if (tokens[s] != kSpecialTokens[s]) throw ParseError("vocab specials out of order");
  }
  std::vector<std::string> rest(tokens.begin() + kNumSpecials, tokens.end());
  Vocab v = from_tokens(rest);
  if (v.size() != tokens.size()) throw ParseError("vocab contains duplicate tokens");
  v.metadata = std::move(metadata);
  return v;
}

// ---------------------------------------------------------------- training

std::size_t base_alphabet_size(std::span<const std::string> corpus) {
  std::set<std::string> base;
  for (const auto& [word, count] : count_words(corpus)) {
    const auto chars = utf8_chars(word);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      base.insert(i == 0 ? chars[i] : std::string(kContinuationPrefix) + chars[i]);
    }
  }
  return base.size();
}

Vocab train_vocab(std::span<const std::string> corpus, const TrainerOptions& options) {
  if (corpus.empty()) throw InvalidArgument("tokenizer corpus is empty");

  std::vector<std::string> symbols;
  std::unordered_map<std::string, int> symbol_ids;
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = symbol_ids.try_emplace(s, static_cast<int>(symbols.size()));
    if (inserted) symbols.push_back(s);
    return it->second;
  };

  struct Word {
    std::vector<int> syms;
    std::int64_t count;
  };
  std::vector<Word> words;
  // Base symbols are added to the vocabulary in sorted order.
  std::set<std::string> base;
  for (auto& [text, count] : count_words(corpus)) {
    Word w{{}, count};
    const auto chars = utf8_chars(text);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      std::string sym = i == 0 ? chars[i] : std::string(kContinuationPrefix) + chars[i];
      base.insert(sym);
      w.syms.push_back(intern(sym));
    }
    words.push_back(std::move(w));
  }
  if (options.target_size < base.size() + kNumSpecials) {
    throw InvalidArgument(fmt::format("target_size {} is below the base alphabet ({}) + {}",
                                      options.target_size, base.size(), kNumSpecials));
  }

  std::vector<std::string> vocab_tokens(base.begin(), base.end());
  std::unordered_set<std::string> in_vocab(base.begin(), base.end());

  using PairKey = std::uint64_t;
  auto key_of = [](int a, int b) {
    return (static_cast<PairKey>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  std::unordered_map<PairKey, std::int64_t> pair_counts;
  std::unordered_map<PairKey, std::unordered_set<std::size_t>> where;

  struct Candidate {
    std::int64_t count;
    std::string merged;
    std::string left, right;
    PairKey key;
  };
  // Max-heap: higher count first, then lexicographically smaller strings.
  auto lower_priority = [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count < b.count;
    if (a.merged != b.merged) return a.merged > b.merged;
    if (a.left != b.left) return a.left > b.left;
    return a.right > b.right;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(lower_priority)> heap(
      lower_priority);
  auto push = [&](PairKey key) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    heap.push({pair_counts[key], symbols[static_cast<std::size_t>(a)] +
                                     strip_continuation(symbols[static_cast<std::size_t>(b)]),
               symbols[static_cast<std::size_t>(a)], symbols[static_cast<std::size_t>(b)], key});
  };

  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto& s = words[w].syms;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const PairKey k = key_of(s[i], s[i + 1]);
      pair_counts[k] += words[w].count;
      where[k].insert(w);
    }
  }
  {
    std::vector<PairKey> keys;
    for (const auto& [k, c] : pair_counts) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (PairKey k : keys) push(k);
  }

  std::size_t merges = 0;
  while (vocab_tokens.size() + kNumSpecials < options.target_size && !heap.empty()) {
    Candidate top = heap.top();
    heap.pop();
    const auto live = pair_counts.find(top.key);
    if (live == pair_counts.end() || live->second != top.count) continue;  // stale
    if (top.count < 2) break;

    const int a = static_cast<int>(top.key >> 32);
    const int b = static_cast<int>(top.key & 0xffffffffu);
    const int merged = intern(top.merged);
    if (in_vocab.insert(top.merged).second) vocab_tokens.push_back(top.merged);
    ++merges;

    std::set<PairKey> touched;
    std::vector<std::size_t> affected(where[top.key].begin(), where[top.key].end());
    std::sort(affected.begin(), affected.end());
    for (std::size_t w : affected) {
      auto& syms = words[w].syms;
      const std::int64_t count = words[w].count;
      bool present = false;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i] == a && syms[i + 1] == b) present = true;
      }
      if (!present) continue;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        const PairKey k = key_of(syms[i], syms[i + 1]);
        pair_counts[k] -= count;
        touched.insert(k);
      }
      std::vector<int> next;
      next.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size(); ++i) {
        if (i + 1 < syms.size() && syms[i] == a && syms[i + 1] == b) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(syms[i]);
        }
      }
      syms = std::move(next);
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        const PairKey k = key_of(syms[i], syms[i + 1]);
        pair_counts[k] += count;
        where[k].insert(w);
        touched.insert(k);
      }
    }
    for (PairKey k : touched) {
      if (pair_counts[k] > 0) push(k);
    }
  }

  Vocab vocab = Vocab::from_tokens(vocab_tokens);
  vocab.metadata["target_size"] = std::to_string(options.target_size);
  vocab.metadata["merges"] = std::to_string(merges);
  vocab.metadata["base_alphabet"] = std::to_string(base.size());
  return vocab;
}

// ---------------------------------------------------------------- encoding

std::vector<TokenId> encode_word(std::string_view word, const Vocab& vocab) {
  const auto chars = utf8_chars(word);
  std::vector<TokenId> pieces;
  std::size_t start = 0;
  while (start < chars.size()) {
    bool matched = false;
    for (std::size_t end = chars.size(); end > start; --end) {
      std::string candidate = start == 0 ? std::string() : std::string(kContinuationPrefix);
      for (std::size_t i = start; i < end; ++i) candidate += chars[i];
      if (auto id = vocab.find(candidate)) {
        pieces.push_back(*id);
        start = end;
        matched = true;
        break;
      }
    }
    if (!matched) return {kUnkId};
  }
  return pieces;
}

std::vector<TokenId> encode(std::string_view text, const Vocab& vocab) {
  std::vector<TokenId> ids;
  for (auto word : split_words(text)) {
    const auto pieces = encode_word(word, vocab);
    ids.insert(ids.end(), pieces.begin(), pieces.end());
  }
  return ids;
}

std::string decode(std::span<const TokenId> ids, const Vocab& vocab) {
  std::string out;
  for (TokenId id : ids) {
    const std::string& tok = vocab.token(id);
    if (id < kNumSpecials) continue;
    if (tok.starts_with(kContinuationPrefix) && !out.empty()) {
      out.append(tok, kContinuationPrefix.size());
    } else {
      if (!out.empty()) out.push_back(' ');
      out += tok;
    }
  }
  return out;
}

}  // namespace mistriage
