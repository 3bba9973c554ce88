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

// Pair features for reply-link scoring: one fixed-length vector per
// (candidate parent, child) utterance pair.

#ifndef UNTANGLE_FEATURES_H_
#define UNTANGLE_FEATURES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "untangle/corpus.h"
#include "untangle/text.h"

namespace untangle {

// Document frequencies over a log, one document per utterance. Tokens that
// occur in fewer than `min_df` documents are left out.
class Vocabulary {
 public:
  struct Entry {
    std::size_t index = 0;
    std::size_t df = 0;
  };

  static Vocabulary Build(const ChatLog& log, std::size_t min_df = 2);

  std::size_t size() const { return entries_.size(); }
  std::size_t document_count() const { return document_count_; }
  const Entry* Find(std::string_view token) const;

  // ln((1 + N) / (1 + df)) + 1
  double Idf(const Entry& entry) const;

 private:
  std::unordered_map<std::string, Entry> entries_;
  std::size_t document_count_ = 0;
};

// Cosine of raw-count tf * idf vectors over in-vocabulary tokens; 0 when
// either vector is all zero.
double TfidfCosine(const Utterance& u, const Utterance& v,
                   const Vocabulary& vocab);

enum class FeatureSlot : std::size_t {
  kSameAuthor = 0,
  kSelfLink,
  kTimeGapLog,
  kGapUnder60s,
  kGapUnder300s,
  kGapUnder3600s,
  kGapUnder86400s,
  kGapAtLeast86400s,
  kDistance,
  kSharedWords,
  kHasSharedWord,
  kTfidfCosine,
  kChildMentionsParentAuthor,
  kParentMentionsChildAuthor,
  kParentHasQuestion,
  kChildHasQuestion,
  kParentLength,
  kChildLength,
};

inline constexpr std::size_t kFeatureDim = 18;
inline constexpr std::string_view kFeatureSchemaName = "untangle-pair-v1";

// Slot names in FeatureSlot order.
std::span<const std::string_view> FeatureNames();

// Every slot lies in [0, 1].
struct LinkFeatureVector {
  std::array<double, kFeatureDim> values{};

  double& operator[](FeatureSlot s) {
    return values[static_cast<std::size_t>(s)];
  }
  double operator[](FeatureSlot s) const {
    return values[static_cast<std::size_t>(s)];
  }
  std::span<const double> span() const { return values; }

  friend bool operator==(const LinkFeatureVector&,
                         const LinkFeatureVector&) = default;
};

// True when `text` contains `name` as a whole token (optionally prefixed by
// '@'), compared case-insensitively.
bool MentionsName(std::string_view text, std::string_view name);

// Extracts pair features for utterances of one log. The vocabulary is built
// from that log; per-utterance data is cached at construction, so the
// extractor does not reference the log afterwards.
//
// Slots for a self-link candidate (parent == child): same_author = 1,
// self_link = 1, question and length slots as usual, every relational slot
// (time gap, buckets, distance, shared words, tf-idf, mentions) = 0.
class PairFeatureExtractor {
 public:
  PairFeatureExtractor(const ChatLog& log, std::size_t window,
                       const Stopwords& stopwords = Stopwords::Default());
  PairFeatureExtractor(const ChatLog& log, Vocabulary vocab,
                       std::size_t window,
                       const Stopwords& stopwords = Stopwords::Default());

  // Indices are positions in the log. Throws OrderingError when parent comes
  // after child.
  LinkFeatureVector Extract(std::size_t parent, std::size_t child) const;

  const Vocabulary& vocabulary() const { return vocab_; }
  std::size_t window() const { return window_; }
  std::size_t size() const { return cache_.size(); }

 private:
  struct Cached {
    std::int64_t timestamp = 0;
    std::string author;        // lowercase
    std::string text;          // lowercase raw text
    bool question = false;
    std::size_t length = 0;    // token count
    std::vector<std::string> content;  // sorted distinct non-stopwords
    std::vector<std::pair<std::size_t, double>> tfidf;  // sorted by index
    double tfidf_norm = 0.0;
  };

  Vocabulary vocab_;
  std::size_t window_;
  std::vector<Cached> cache_;
};

// Single-pair convenience wrapper over PairFeatureExtractor; `vocab` should
// be built from `log`. Both utterances must belong to the log.
LinkFeatureVector ExtractPairFeatures(
    const Utterance& parent, const Utterance& child, const ChatLog& log,
    const Vocabulary& vocab, std::size_t window,
    const Stopwords& stopwords = Stopwords::Default());

}  // namespace untangle

#endif  // UNTANGLE_FEATURES_H_
