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

// Utterance text normalization: ASCII folding, placeholder replacement for
// low-frequency spans, tokenization and rule-based lemmatization.

#ifndef UNTANGLE_TEXT_H_
#define UNTANGLE_TEXT_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "untangle/corpus.h"

namespace untangle {

enum class Placeholder { kCode = 0, kHtml, kUrl, kEmail, kId };

inline constexpr std::array<std::string_view, 5> kPlaceholderTokens = {
    "[CODE]", "[HTML]", "[URL]", "[EMAIL]", "[ID]"};

inline constexpr std::string_view PlaceholderToken(Placeholder p) {
  return kPlaceholderTokens[static_cast<std::size_t>(p)];
}

bool IsPlaceholder(std::string_view token);

struct PlaceholderCounts {
  std::array<std::size_t, 5> counts{};

  std::size_t& operator[](Placeholder p) {
    return counts[static_cast<std::size_t>(p)];
  }
  std::size_t operator[](Placeholder p) const {
    return counts[static_cast<std::size_t>(p)];
  }
  PlaceholderCounts& operator+=(const PlaceholderCounts& other);
};

// Applies, in order: non-ASCII folding (nearest ASCII or dropped), code spans
// -> [CODE], HTML tags -> [HTML], URLs -> [URL], e-mail addresses -> [EMAIL],
// version numbers -> [ID]. Each match becomes one placeholder. Idempotent.
std::string NormalizeText(std::string_view raw,
                          PlaceholderCounts* counts = nullptr);

// surface -> lemma overrides consulted before the suffix rules.
class LemmaDictionary {
 public:
  LemmaDictionary() = default;

  // One "surface<TAB>lemma" pair per line; '#' comments and blank lines are
  // ignored. Throws ParseError on lines without a tab.
  static LemmaDictionary FromText(std::string_view text,
                                  const std::string& source_name);
  static LemmaDictionary FromFile(const std::string& path);

  // The dictionary shipped with the library.
  static const LemmaDictionary& Default();

  std::optional<std::string_view> Lookup(std::string_view surface) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::string> entries_;
};

class Stopwords {
 public:
  Stopwords() = default;

  // One token per line; blank lines ignored.
  static Stopwords FromText(std::string_view text);
  static Stopwords FromFile(const std::string& path);
  static const Stopwords& Default();

  bool Contains(std::string_view token) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Lemma of a lowercase word: dictionary entry if present, otherwise the
// suffix rules (-ies -> y, -ing, -ed, -es, -s) with consonant undoubling.
std::string Lemmatize(std::string_view word, const LemmaDictionary& dict);

// Splits normalized text into word runs and single punctuation characters.
// Placeholders stay atomic; case is preserved.
std::vector<std::string> Tokenize(std::string_view norm);

// Tokenize, then lowercase and lemmatize every non-placeholder token.
std::vector<std::string> TokenizeAndLemmatize(
    std::string_view norm,
    const LemmaDictionary& dict = LemmaDictionary::Default());

struct PreprocessResult {
  ChatLog log;
  PlaceholderCounts counts;
};

// Normalizes every utterance and fills norm_tokens. raw_text is left
// untouched; `normalized_text` (when non-null) receives the normalized
// strings in log order.
PreprocessResult Preprocess(
    const ChatLog& log,
    const LemmaDictionary& dict = LemmaDictionary::Default(),
    std::vector<std::string>* normalized_text = nullptr);

// Fills norm_tokens for utterances that have none.
ChatLog EnsureTokens(const ChatLog& log,
                     const LemmaDictionary& dict = LemmaDictionary::Default());

// Optional exclusion filter: drops every gold dialog whose tokens are more
// than `max_placeholder_fraction` placeholders. Utterances without a gold
// label are kept. Requires tokens.
ChatLog DropPlaceholderHeavyDialogs(const ChatLog& log,
                                    double max_placeholder_fraction = 0.5);

}  // namespace untangle

#endif  // UNTANGLE_TEXT_H_
