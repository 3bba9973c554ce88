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

#include "untangle/text.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <utility>

#include "untangle/error.h"

namespace untangle {
namespace internal {
extern const std::string_view kEmbeddedStopwords;
extern const std::string_view kEmbeddedLemmaExceptions;
}  // namespace internal

namespace {

bool IsWordChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}
bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsAlpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
char ToLower(char c) { return (c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c; }

// ASCII replacement for a code point, or empty to drop it.
std::string_view FoldCodePoint(char32_t cp) {
  // Latin-1 supplement letters, indexed from U+00C0.
  static constexpr std::string_view kLatin1[] = {
      "A", "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I", "I",
      "I", "I", "D", "N", "O", "O", "O", "O", "O", "x", "O", "U", "U", "U",
      "U", "Y", "TH", "ss", "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e",
      "e", "e", "i", "i", "i", "i", "d", "n", "o", "o", "o", "o", "o", "/",
      "o", "u", "u", "u", "u", "y", "th", "y"};
  if (cp >= 0xC0 && cp <= 0xFF) return kLatin1[cp - 0xC0];
  switch (cp) {
    case 0x00A0:  // no-break space
    case 0x2002:
    case 0x2003:
    case 0x2009:
    case 0x3000:
      return " ";
    case 0x2018:
    case 0x2019:
    case 0x201A:
    case 0x2032:
      return "'";
    case 0x201C:
    case 0x201D:
    case 0x201E:
    case 0x2033:
      return "\"";
    case 0x2010:
    case 0x2011:
    case 0x2012:
    case 0x2013:
    case 0x2014:
    case 0x2212:
      return "-";
    case 0x2026:
      return "...";
    case 0x00AB:
      return "<<";
    case 0x00BB:
      return ">>";
    case 0x00D7:
      return "x";
    case 0x0152:
      return "OE";
    case 0x0153:
      return "oe";
    case 0x0141:
      return "L";
    case 0x0142:
      return "l";
    case 0x2022:
      return "*";
    default:
      break;
  }
  // Latin Extended-A: even code points are upper case, odd lower case, and
  // they fold to the base letter of their block.
  if (cp >= 0x0100 && cp <= 0x017F) {
    static constexpr std::string_view kExtA =
        "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIiIiJjKkkLlLlLlL"
        "lLlNnNnNnnNnOoOoOoOoRrRrRrSsSsSsSsTtTtTtUuUuUuUuUuUuWwYyYZzZzZzs";
    std::size_t i = cp - 0x0100;
    if (i < kExtA.size()) return kExtA.substr(i, 1);
  }
  return {};
}

// Decodes UTF-8 and keeps ASCII, folding or dropping everything else.
// Invalid byte sequences are dropped.
std::string FoldToAscii(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    auto b = static_cast<unsigned char>(in[i]);
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
      ++i;
      continue;
    }
    int len = (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > in.size()) {
      ++i;
      continue;
    }
    char32_t cp = b & (0x7F >> len);
    bool valid = true;
    for (int k = 1; k < len; ++k) {
      auto cont = static_cast<unsigned char>(in[i + k]);
      if ((cont >> 6) != 0x2) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (!valid) {
      ++i;
      continue;
    }
    out.append(FoldCodePoint(cp));
    i += len;
  }
  return out;
}

// A replacement pass: `match(text, pos)` returns the length of a match
// starting at pos (0 for none). Matches are replaced left to right.
template <typename Matcher>
std::string ReplaceSpans(const std::string& text, std::string_view token,
                         std::size_t* count, Matcher match) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = match(text, i);
    if (len > 0) {
      out.append(token);
      ++*count;
      i += len;
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

std::size_t MatchFencedCode(const std::string& s, std::size_t i) {
  if (s.compare(i, 3, "```") != 0) return 0;
  std::size_t close = s.find("```", i + 3);
  if (close == std::string::npos) return 0;
  return close + 3 - i;
}

std::size_t BacktickRun(const std::string& s, std::size_t i) {
  std::size_t j = i;
  while (j < s.size() && s[j] == '`') ++j;
  return j - i;
}

// A run of n backticks opens a span that only a run of exactly n closes on
// the same line. An unmatched run is copied whole, so a later pass cannot
// pair its tail with some other backtick.
std::string ReplaceInlineCode(const std::string& s, std::size_t* count) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '`') {
      out.push_back(s[i++]);
      continue;
    }
    const std::size_t open = BacktickRun(s, i);
    std::size_t j = i + open;
    std::size_t close = 0;
    while (j < s.size() && s[j] != '\n') {
      if (s[j] != '`') {
        ++j;
        continue;
      }
      std::size_t run = BacktickRun(s, j);
      if (run == open) {
        close = j + run;
        break;
      }
      j += run;
    }
    if (close > i + 2 * open) {
      out.append(PlaceholderToken(Placeholder::kCode));
      ++*count;
      i = close;
    } else {
      out.append(s, i, open);
      i += open;
    }
  }
  return out;
}

// <tag>, </tag>, <tag/>, <tag attr=...>. Attribute text may not contain
// '<' or '['; the latter keeps a tag around an earlier placeholder unmatched
// on every pass.
std::size_t MatchHtmlTag(const std::string& s, std::size_t i) {
  if (s[i] != '<') return 0;
  std::size_t j = i + 1;
  if (j < s.size() && s[j] == '/') ++j;
  if (j >= s.size() || !IsAlpha(s[j])) return 0;
  while (j < s.size() && (IsAlpha(s[j]) || IsDigit(s[j]) || s[j] == '-')) ++j;
  if (j >= s.size()) return 0;
  if (s[j] == '>') return j + 1 - i;
  if (s[j] == '/' && j + 1 < s.size() && s[j + 1] == '>') return j + 2 - i;
  if (!IsSpace(s[j])) return 0;
  while (j < s.size() && s[j] != '<' && s[j] != '>' && s[j] != '[') ++j;
  if (j >= s.size() || s[j] != '>') return 0;
  return j + 1 - i;
}

bool StartsWithNoCase(const std::string& s, std::size_t i,
                      std::string_view prefix) {
  if (s.size() - i < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (ToLower(s[i + k]) != prefix[k]) return false;
  }
  return true;
}

bool IsUrlChar(char c) {
  return !IsSpace(c) && c != '<' && c != '>' && c != '"' && c != '\'' &&
         c != '`' && c != '[' && c != ']';
}

std::size_t MatchUrl(const std::string& s, std::size_t i) {
  if (i > 0 && IsWordChar(s[i - 1])) return 0;
  std::size_t body = 0;
  for (std::string_view scheme : {"https://", "http://", "ftp://", "www."}) {
    if (StartsWithNoCase(s, i, scheme)) {
      body = i + scheme.size();
      break;
    }
  }
  if (body == 0) return 0;
  std::size_t j = body;
  while (j < s.size() && IsUrlChar(s[j])) ++j;
  // Sentence punctuation directly after a URL is not part of it.
  static constexpr std::string_view kTrailing = ".,;:!?)}";
  while (j > body && kTrailing.find(s[j - 1]) != std::string_view::npos) --j;
  if (j == body) return 0;
  return j - i;
}

bool IsEmailLocalChar(char c) {
  return IsAlpha(c) || IsDigit(c) || c == '.' || c == '_' || c == '%' ||
         c == '+' || c == '-';
}
bool IsDomainChar(char c) {
  return IsAlpha(c) || IsDigit(c) || c == '.' || c == '-';
}

// Emails are found from their '@', so the pass rewrites the local part that
// was already copied to the output.
std::string ReplaceEmails(const std::string& s, std::size_t* count) {
  std::string out;
  out.reserve(s.size());
  std::size_t copied = 0;
  std::size_t at = s.find('@');
  while (at != std::string::npos) {
    std::size_t start = at;
    while (start > copied && IsEmailLocalChar(s[start - 1])) --start;
    std::size_t span_end = at + 1;
    while (span_end < s.size() && IsDomainChar(s[span_end])) ++span_end;
    // Longest domain ending in ".<letters>{2,}" with a non-empty head.
    std::size_t end = 0;
    for (std::size_t e = span_end; e > at + 1 && end == 0; --e) {
      std::size_t k = e;
      while (k > at + 1 && IsAlpha(s[k - 1])) --k;
      if (e - k >= 2 && k > at + 2 && s[k - 1] == '.') end = e;
    }
    if (start < at && end != 0) {
      out.append(s, copied, start - copied);
      out.append(PlaceholderToken(Placeholder::kEmail));
      ++*count;
      copied = end;
      at = s.find('@', end);
    } else {
      at = s.find('@', at + 1);
    }
  }
  out.append(s, copied, std::string::npos);
  return out;
}

// v?\d+(\.\d+)+ bounded by non-word characters on both sides.
std::size_t MatchVersion(const std::string& s, std::size_t i) {
  if (i > 0 && IsWordChar(s[i - 1])) return 0;
  std::size_t j = i;
  if (s[j] == 'v' || s[j] == 'V') ++j;
  std::size_t digits = j;
  while (j < s.size() && IsDigit(s[j])) ++j;
  if (j == digits) return 0;
  std::vector<std::size_t> group_ends;
  while (j + 1 < s.size() && s[j] == '.' && IsDigit(s[j + 1])) {
    ++j;
    while (j < s.size() && IsDigit(s[j])) ++j;
    group_ends.push_back(j);
  }
  while (!group_ends.empty()) {
    std::size_t end = group_ends.back();
    if (end == s.size() || !IsWordChar(s[end])) return end - i;
    group_ends.pop_back();
  }
  return 0;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string ReadWholeFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool HasVowel(std::string_view s) {
  return s.find_first_of("aeiouy") != std::string_view::npos;
}

std::string Undouble(std::string stem) {
  std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] &&
      std::string_view("aeioulsz").find(stem[n - 1]) == std::string_view::npos) {
    stem.pop_back();
  }
  return stem;
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

bool IsPlaceholder(std::string_view token) {
  return std::find(kPlaceholderTokens.begin(), kPlaceholderTokens.end(),
                   token) != kPlaceholderTokens.end();
}

PlaceholderCounts& PlaceholderCounts::operator+=(
    const PlaceholderCounts& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

std::string NormalizeText(std::string_view raw, PlaceholderCounts* counts) {
  PlaceholderCounts local;
  std::string s = FoldToAscii(raw);
  s = ReplaceSpans(s, PlaceholderToken(Placeholder::kCode),
                   &local[Placeholder::kCode], MatchFencedCode);
  s = ReplaceInlineCode(s, &local[Placeholder::kCode]);
  s = ReplaceSpans(s, PlaceholderToken(Placeholder::kHtml),
                   &local[Placeholder::kHtml], MatchHtmlTag);
  s = ReplaceSpans(s, PlaceholderToken(Placeholder::kUrl),
                   &local[Placeholder::kUrl], MatchUrl);
  s = ReplaceEmails(s, &local[Placeholder::kEmail]);
  s = ReplaceSpans(s, PlaceholderToken(Placeholder::kId),
                   &local[Placeholder::kId], MatchVersion);
  if (counts != nullptr) *counts += local;
  return s;
}

LemmaDictionary LemmaDictionary::FromText(std::string_view text,
                                          const std::string& source_name) {
  LemmaDictionary dict;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size()) {
      throw ParseError(source_name, line_no, "expected surface<TAB>lemma");
    }
    dict.entries_.insert_or_assign(std::string(line.substr(0, tab)),
                                   std::string(line.substr(tab + 1)));
  }
  return dict;
}

LemmaDictionary LemmaDictionary::FromFile(const std::string& path) {
  return FromText(ReadWholeFile(path), path);
}

const LemmaDictionary& LemmaDictionary::Default() {
  static const LemmaDictionary dict =
      FromText(internal::kEmbeddedLemmaExceptions, "lemma_exceptions.txt");
  return dict;
}

std::optional<std::string_view> LemmaDictionary::Lookup(
    std::string_view surface) const {
  auto it = entries_.find(std::string(surface));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Stopwords Stopwords::FromText(std::string_view text) {
  Stopwords stopwords;
  for (std::string_view line : SplitLines(text)) {
    while (!line.empty() && IsSpace(line.back())) line.remove_suffix(1);
    while (!line.empty() && IsSpace(line.front())) line.remove_prefix(1);
    if (!line.empty()) stopwords.words_.emplace(line);
  }
  return stopwords;
}

Stopwords Stopwords::FromFile(const std::string& path) {
  return FromText(ReadWholeFile(path));
}

const Stopwords& Stopwords::Default() {
  static const Stopwords stopwords = FromText(internal::kEmbeddedStopwords);
  return stopwords;
}

bool Stopwords::Contains(std::string_view token) const {
  return words_.contains(std::string(token));
}

std::string Lemmatize(std::string_view word, const LemmaDictionary& dict) {
  if (auto lemma = dict.Lookup(word)) return std::string(*lemma);
  if (word.size() <= 3 ||
      std::any_of(word.begin(), word.end(), [](char c) { return !IsAlpha(c); })) {
    return std::string(word);
  }
  auto stem_of = [&](std::size_t suffix) {
    return std::string(word.substr(0, word.size() - suffix));
  };
  if (EndsWith(word, "ies") && word.size() > 4) return stem_of(3) + "y";
  if (EndsWith(word, "ing")) {
    std::string stem = stem_of(3);
    if (stem.size() >= 3 && HasVowel(stem)) return Undouble(std::move(stem));
    return std::string(word);
  }
  if (EndsWith(word, "ed")) {
    std::string stem = stem_of(2);
    if (stem.size() >= 3 && HasVowel(stem)) return Undouble(std::move(stem));
    return std::string(word);
  }
  if (EndsWith(word, "sses") || EndsWith(word, "xes") ||
      EndsWith(word, "zes") || EndsWith(word, "ches") ||
      EndsWith(word, "shes")) {
    return stem_of(2);
  }
  if (EndsWith(word, "s") && !EndsWith(word, "ss") && !EndsWith(word, "us") &&
      !EndsWith(word, "is")) {
    return stem_of(1);
  }
  return std::string(word);
}

std::vector<std::string> Tokenize(std::string_view norm) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < norm.size()) {
    char c = norm[i];
    if (IsSpace(c)) {
      ++i;
      continue;
    }
    if (c == '[') {
      auto it = std::find_if(
          kPlaceholderTokens.begin(), kPlaceholderTokens.end(),
          [&](std::string_view p) { return norm.substr(i, p.size()) == p; });
      if (it != kPlaceholderTokens.end()) {
        tokens.emplace_back(*it);
        i += it->size();
        continue;
      }
    }
    auto is_word = [](char ch) {
      return IsWordChar(ch) || static_cast<unsigned char>(ch) >= 0x80;
    };
    if (is_word(c)) {
      std::size_t j = i;
      while (j < norm.size() && is_word(norm[j])) ++j;
      tokens.emplace_back(norm.substr(i, j - i));
      i = j;
    } else {
      tokens.emplace_back(1, c);
      ++i;
    }
  }
  return tokens;
}

std::vector<std::string> TokenizeAndLemmatize(std::string_view norm,
                                              const LemmaDictionary& dict) {
  std::vector<std::string> tokens = Tokenize(norm);
  for (auto& token : tokens) {
    if (IsPlaceholder(token)) continue;
    std::transform(token.begin(), token.end(), token.begin(), ToLower);
    token = Lemmatize(token, dict);
  }
  return tokens;
}

PreprocessResult Preprocess(const ChatLog& log, const LemmaDictionary& dict,
                            std::vector<std::string>* normalized_text) {
  PreprocessResult result;
  std::vector<Utterance> utterances(log.utterances().begin(),
                                    log.utterances().end());
  for (auto& u : utterances) {
    std::string norm = NormalizeText(u.raw_text, &result.counts);
    u.norm_tokens = TokenizeAndLemmatize(norm, dict);
    if (normalized_text != nullptr) normalized_text->push_back(std::move(norm));
  }
  result.log = ChatLog(std::move(utterances), log.project());
  return result;
}

ChatLog EnsureTokens(const ChatLog& log, const LemmaDictionary& dict) {
  std::vector<Utterance> utterances(log.utterances().begin(),
                                    log.utterances().end());
  for (auto& u : utterances) {
    if (u.norm_tokens.empty()) {
      u.norm_tokens = TokenizeAndLemmatize(NormalizeText(u.raw_text), dict);
    }
  }
  return ChatLog(std::move(utterances), log.project());
}

ChatLog DropPlaceholderHeavyDialogs(const ChatLog& log,
                                    double max_placeholder_fraction) {
  struct Tally {
    std::size_t tokens = 0;
    std::size_t placeholders = 0;
  };
  std::unordered_map<std::string, Tally> tallies;
  for (const auto& u : log.utterances()) {
    if (!u.gold_dialog) continue;
    Tally& t = tallies[*u.gold_dialog];
    t.tokens += u.norm_tokens.size();
    t.placeholders += static_cast<std::size_t>(std::count_if(
        u.norm_tokens.begin(), u.norm_tokens.end(),
        [](const std::string& tok) { return IsPlaceholder(tok); }));
  }
  std::vector<Utterance> kept;
  for (const auto& u : log.utterances()) {
    if (u.gold_dialog) {
      const Tally& t = tallies.at(*u.gold_dialog);
      if (t.tokens > 0 &&
          static_cast<double>(t.placeholders) >
              max_placeholder_fraction * static_cast<double>(t.tokens)) {
        continue;
      }
    }
    kept.push_back(u);
  }
  return ChatLog(std::move(kept), log.project());
}

}  // namespace untangle
