// Copyright 2026 The untangle Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "untangle/features.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "untangle/error.h"

namespace untangle {
namespace {

constexpr double kMaxGapSeconds = 86400.0;
constexpr double kMaxLength = 200.0;
constexpr double kSharedWordCap = 5.0;

constexpr std::array<std::string_view, kFeatureDim> kFeatureNames = {
    "same_author",
    "is_self_link",
    "time_gap_log",
    "gap_lt_60s",
    "gap_lt_300s",
    "gap_lt_3600s",
    "gap_lt_86400s",
    "gap_ge_86400s",
    "utterance_distance",
    "shared_words",
    "has_shared_word",
    "tfidf_cosine",
    "child_mentions_parent_author",
    "parent_mentions_child_author",
    "parent_has_question_mark",
    "child_has_question_mark",
    "parent_length_log",
    "child_length_log",
};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool IsNameChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-';
}

bool HasAlnum(std::string_view token) {
  return std::any_of(token.begin(), token.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9');
  });
}

// Sparse tf-idf vector sorted by vocabulary index.
std::vector<std::pair<std::size_t, double>> TfidfVector(
    std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::map<std::size_t, std::pair<double, double>> counts;  // index -> tf, idf
  for (const auto& token : tokens) {
    if (const auto* entry = vocab.Find(token)) {
      auto& slot = counts[entry->index];
      slot.first += 1.0;
      slot.second = vocab.Idf(*entry);
    }
  }
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(counts.size());
  for (const auto& [index, tf_idf] : counts) {
    out.emplace_back(index, tf_idf.first * tf_idf.second);
  }
  return out;
}

double Norm(std::span<const std::pair<std::size_t, double>> v) {
  double sum = 0.0;
  for (const auto& [index, w] : v) sum += w * w;
  return std::sqrt(sum);
}

double SparseCosine(std::span<const std::pair<std::size_t, double>> a,
                    double norm_a,
                    std::span<const std::pair<std::size_t, double>> b,
                    double norm_b) {
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return std::clamp(dot / (norm_a * norm_b), 0.0, 1.0);
}

double LengthFeature(std::size_t length) {
  double capped = std::min(static_cast<double>(length), kMaxLength);
  return std::log1p(capped) / std::log1p(kMaxLength);
}

}  // namespace

Vocabulary Vocabulary::Build(const ChatLog& log, std::size_t min_df) {
  std::map<std::string, std::size_t> df;
  for (const auto& u : log.utterances()) {
    std::set<std::string_view> distinct(u.norm_tokens.begin(),
                                        u.norm_tokens.end());
    for (auto token : distinct) ++df[std::string(token)];
  }
  Vocabulary vocab;
  vocab.document_count_ = log.size();
  for (const auto& [token, count] : df) {
    if (count < std::max<std::size_t>(min_df, 1)) continue;
    vocab.entries_.emplace(token, Entry{vocab.entries_.size(), count});
  }
  return vocab;
}

const Vocabulary::Entry* Vocabulary::Find(std::string_view token) const {
  auto it = entries_.find(std::string(token));
  return it == entries_.end() ? nullptr : &it->second;
}

double Vocabulary::Idf(const Entry& entry) const {
  return std::log((1.0 + static_cast<double>(document_count_)) /
                  (1.0 + static_cast<double>(entry.df))) +
         1.0;
}

double TfidfCosine(const Utterance& u, const Utterance& v,
                   const Vocabulary& vocab) {
  auto a = TfidfVector(u.norm_tokens, vocab);
  auto b = TfidfVector(v.norm_tokens, vocab);
  return SparseCosine(a, Norm(a), b, Norm(b));
}

std::span<const std::string_view> FeatureNames() { return kFeatureNames; }

bool MentionsName(std::string_view text, std::string_view name) {
  if (name.empty()) return false;
  std::string haystack = Lower(text);
  std::string needle = Lower(name);
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + 1)) {
    std::size_t end = pos + needle.size();
    bool starts = pos == 0 || !IsNameChar(haystack[pos - 1]);
    bool ends = end == haystack.size() || !IsNameChar(haystack[end]);
    if (starts && ends) return true;
  }
  return false;
}

PairFeatureExtractor::PairFeatureExtractor(const ChatLog& log,
                                           std::size_t window,
                                           const Stopwords& stopwords)
    : PairFeatureExtractor(log, Vocabulary::Build(log), window, stopwords) {}

PairFeatureExtractor::PairFeatureExtractor(const ChatLog& log,
                                           Vocabulary vocab,
                                           std::size_t window,
                                           const Stopwords& stopwords)
    : vocab_(std::move(vocab)), window_(std::max<std::size_t>(window, 1)) {
  cache_.reserve(log.size());
  for (const auto& u : log.utterances()) {
    Cached c;
    c.timestamp = u.timestamp;
    c.author = Lower(u.author);
    c.text = Lower(u.raw_text);
    c.question = u.raw_text.find('?') != std::string::npos;
    c.length = u.norm_tokens.size();
    for (const auto& token : u.norm_tokens) {
      if (HasAlnum(token) && !stopwords.Contains(token)) {
        c.content.push_back(token);
      }
    }
    std::sort(c.content.begin(), c.content.end());
    c.content.erase(std::unique(c.content.begin(), c.content.end()),
                    c.content.end());
    c.tfidf = TfidfVector(u.norm_tokens, vocab_);
    c.tfidf_norm = Norm(c.tfidf);
    cache_.push_back(std::move(c));
  }
}

LinkFeatureVector PairFeatureExtractor::Extract(std::size_t parent,
                                                std::size_t child) const {
  if (parent > child) {
    throw OrderingError("candidate parent " + std::to_string(parent) +
                        " comes after child " + std::to_string(child));
  }
  if (child >= cache_.size()) {
    throw OrderingError("utterance index " + std::to_string(child) +
                        " is outside the log");
  }
  const Cached& p = cache_[parent];
  const Cached& c = cache_[child];
  LinkFeatureVector f;
  f[FeatureSlot::kParentHasQuestion] = p.question ? 1.0 : 0.0;
  f[FeatureSlot::kChildHasQuestion] = c.question ? 1.0 : 0.0;
  f[FeatureSlot::kParentLength] = LengthFeature(p.length);
  f[FeatureSlot::kChildLength] = LengthFeature(c.length);
  if (parent == child) {
    f[FeatureSlot::kSameAuthor] = 1.0;
    f[FeatureSlot::kSelfLink] = 1.0;
    return f;
  }

  f[FeatureSlot::kSameAuthor] = p.author == c.author ? 1.0 : 0.0;

  double gap = static_cast<double>(c.timestamp - p.timestamp);
  double capped = std::min(gap, kMaxGapSeconds);
  f[FeatureSlot::kTimeGapLog] = std::log1p(capped) / std::log1p(kMaxGapSeconds);
  FeatureSlot bucket = gap < 60.0      ? FeatureSlot::kGapUnder60s
                       : gap < 300.0   ? FeatureSlot::kGapUnder300s
                       : gap < 3600.0  ? FeatureSlot::kGapUnder3600s
                       : gap < 86400.0 ? FeatureSlot::kGapUnder86400s
                                       : FeatureSlot::kGapAtLeast86400s;
  f[bucket] = 1.0;

  double intervening = static_cast<double>(child - parent - 1);
  f[FeatureSlot::kDistance] =
      std::min(intervening / static_cast<double>(window_), 1.0);

  std::size_t shared = 0;
  {
    std::size_t i = 0, j = 0;
    while (i < p.content.size() && j < c.content.size()) {
      int cmp = p.content[i].compare(c.content[j]);
      if (cmp < 0) {
        ++i;
      } else if (cmp > 0) {
        ++j;
      } else {
        ++shared;
        ++i;
        ++j;
      }
    }
  }
  f[FeatureSlot::kSharedWords] =
      std::min(static_cast<double>(shared), kSharedWordCap) / kSharedWordCap;
  f[FeatureSlot::kHasSharedWord] = shared > 0 ? 1.0 : 0.0;
  f[FeatureSlot::kTfidfCosine] =
      SparseCosine(p.tfidf, p.tfidf_norm, c.tfidf, c.tfidf_norm);
  f[FeatureSlot::kChildMentionsParentAuthor] =
      MentionsName(c.text, p.author) ? 1.0 : 0.0;
  f[FeatureSlot::kParentMentionsChildAuthor] =
      MentionsName(p.text, c.author) ? 1.0 : 0.0;
  return f;
}

LinkFeatureVector ExtractPairFeatures(const Utterance& parent,
                                      const Utterance& child,
                                      const ChatLog& log,
                                      const Vocabulary& vocab,
                                      std::size_t window,
                                      const Stopwords& stopwords) {
  auto p = log.IndexOf(parent.id);
  auto c = log.IndexOf(child.id);
  if (!p || !c) {
    throw OrderingError("utterance pair " + parent.id + ", " + child.id +
                        " is not part of the log");
  }
  PairFeatureExtractor extractor(log, vocab, window, stopwords);
  return extractor.Extract(*p, *c);
}

}  // namespace untangle
