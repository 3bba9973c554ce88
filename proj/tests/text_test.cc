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


#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "untangle/error.h"
#include "untangle/text.h"

namespace untangle {
namespace {

using Tokens = std::vector<std::string>;

TEST(NormalizeTextTest, ReplacesUrl) {
  EXPECT_EQ(NormalizeText("check https://example.com please"),
            "check [URL] please");
}

TEST(NormalizeTextTest, EmptyStaysEmpty) { EXPECT_EQ(NormalizeText(""), ""); }

TEST(NormalizeTextTest, ReplacesEmailAndVersion) {
  EXPECT_EQ(NormalizeText("mail a@b.com about v1.2.3"),
            "mail [EMAIL] about [ID]");
}

TEST(NormalizeTextTest, CodeSpansComeFirst) {
  EXPECT_EQ(NormalizeText("run `curl http://x.org/a` now"), "run [CODE] now");
  EXPECT_EQ(NormalizeText("```\nint main() {}\n``` done"), "[CODE] done");
}

TEST(NormalizeTextTest, HtmlTags) {
  EXPECT_EQ(NormalizeText("<b>bold</b>"), "[HTML]bold[HTML]");
  // The outer span must not become a tag once the inner one is replaced.
  EXPECT_EQ(NormalizeText("<e x <div class='x'>>"), "<e x [HTML]>");
  EXPECT_EQ(NormalizeText("<a `x`>"), "<a [CODE]>");
}

TEST(NormalizeTextTest, UrlVariantsAndTrailingPunctuation) {
  EXPECT_EQ(NormalizeText("see www.gitter.im."), "see [URL].");
  EXPECT_EQ(NormalizeText("(ftp://host/file)"), "([URL])");
}

TEST(NormalizeTextTest, VersionNeedsTwoGroups) {
  EXPECT_EQ(NormalizeText("version 2 or 2.0 or 10.4.1-rc"),
            "version 2 or [ID] or [ID]-rc");
}

TEST(NormalizeTextTest, FoldsOrDropsNonAscii) {
  EXPECT_EQ(NormalizeText("caf\xc3\xa9 na\xc3\xafve \xe2\x80\x9cq\xe2\x80\x9d"),
            "cafe naive \"q\"");
  // CJK has no ASCII neighbour and is dropped.
  EXPECT_EQ(NormalizeText("a\xe4\xbd\xa0" "b"), "ab");
}

TEST(NormalizeTextTest, CountsPerClass) {
  PlaceholderCounts counts;
  NormalizeText("`x` <p> http://a.b c@d.io 1.2 1.3", &counts);
  EXPECT_EQ(counts[Placeholder::kCode], 1u);
  EXPECT_EQ(counts[Placeholder::kHtml], 1u);
  EXPECT_EQ(counts[Placeholder::kUrl], 1u);
  EXPECT_EQ(counts[Placeholder::kEmail], 1u);
  EXPECT_EQ(counts[Placeholder::kId], 2u);
}

TEST(NormalizeTextTest, IdempotentOnRandomCorpus) {
  const std::vector<std::string> pieces = {
      "hello", "World", " ", " ", "\t", "\n", ".", ",", "?", "!", "(", ")",
      "[", "]", "<", ">", "/", "`", "```", "@", ":", "-", "_", "'", "\"",
      "1", "2.3", "v4.5.6", "http://", "https://a.io/x?y=1", "www.", ".com",
      "me@mail.org", "<div class='x'>", "</div>", "[URL]", "[ID]", "[CODE]",
      "\xc3\xa9", "\xc5\x93", "\xe2\x80\x94", "\xf0\x9f\x98\x80", "\xff",
      "a.b", "x@", "1.2.x", "..", "v", "ID"};
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 20000; ++trial) {
    std::string s;
    const int len = static_cast<int>(rng() % 16);
    for (int k = 0; k < len; ++k) s += pieces[rng() % pieces.size()];
    const std::string once = NormalizeText(s);
    ASSERT_EQ(NormalizeText(once), once) << "input: " << s;
    for (unsigned char c : once) ASSERT_LT(c, 0x80) << "input: " << s;
  }
}

TEST(TokenizeAndLemmatizeTest, SuffixRules) {
  EXPECT_EQ(TokenizeAndLemmatize("Fixed the bugs"), (Tokens{"fix", "the", "bug"}));
  EXPECT_EQ(TokenizeAndLemmatize("running, tests!"),
            (Tokens{"run", ",", "test", "!"}));
}

TEST(TokenizeAndLemmatizeTest, PlaceholdersAreAtomic) {
  EXPECT_EQ(TokenizeAndLemmatize("[URL]"), (Tokens{"[URL]"}));
  EXPECT_EQ(TokenizeAndLemmatize("see [CODE], [ID]."),
            (Tokens{"see", "[CODE]", ",", "[ID]", "."}));
}

TEST(TokenizeAndLemmatizeTest, OutputIsLowercaseOrPlaceholder) {
  for (const auto& t : TokenizeAndLemmatize(
           NormalizeText("Hello WORLD https://x.io Äpfel CamelCase 1.2"))) {
    if (IsPlaceholder(t)) continue;
    for (char c : t) EXPECT_FALSE(c >= 'A' && c <= 'Z') << t;
  }
}

TEST(LemmatizeTest, RuleTable) {
  const LemmaDictionary empty;
  struct Case {
    const char* in;
    const char* out;
  };
  for (const Case& c : {Case{"queries", "query"}, Case{"boxes", "box"},
                        Case{"classes", "class"}, Case{"watches", "watch"},
                        Case{"stopped", "stop"}, Case{"installing", "install"},
                        Case{"falling", "fall"}, Case{"buzzing", "buzz"},
                        Case{"status", "status"}, Case{"class", "class"},
                        Case{"bus", "bus"}, Case{"its", "its"},
                        Case{"thing", "thing"}, Case{"red", "red"},
                        Case{"abc123", "abc123"}}) {
    EXPECT_EQ(Lemmatize(c.in, empty), c.out) << c.in;
  }
}

TEST(LemmatizeTest, DictionaryOverridesRules) {
  LemmaDictionary dict = LemmaDictionary::FromText("# test\nwas\tbe\nmice\tmouse\n", "d");
  EXPECT_EQ(Lemmatize("was", dict), "be");
  EXPECT_EQ(Lemmatize("mice", dict), "mouse");
  EXPECT_EQ(Lemmatize("was", LemmaDictionary{}), "was");
  EXPECT_THROW(LemmaDictionary::FromText("no tab here\n", "d"), ParseError);
}

TEST(LemmatizeTest, DefaultDictionaryIsLoaded) {
  EXPECT_GT(LemmaDictionary::Default().size(), 50u);
  EXPECT_EQ(Lemmatize("was", LemmaDictionary::Default()), "be");
  EXPECT_GT(Stopwords::Default().size(), 20u);
  EXPECT_TRUE(Stopwords::Default().Contains("the"));
}

TEST(PreprocessTest, FillsTokensAndKeepsRawText) {
  Utterance u;
  u.id = "u1";
  u.author = "a";
  u.raw_text = "Visit https://x.io now";
  PreprocessResult r = Preprocess(ChatLog({u}));
  EXPECT_EQ(r.log[0].raw_text, u.raw_text);
  EXPECT_EQ(r.log[0].norm_tokens, (Tokens{"visit", "[URL]", "now"}));
  EXPECT_EQ(r.counts[Placeholder::kUrl], 1u);
}

TEST(PreprocessTest, DropsPlaceholderHeavyDialogs) {
  auto make = [](std::string id, std::string text, std::string dialog) {
    Utterance u;
    u.id = std::move(id);
    u.author = "a";
    u.raw_text = std::move(text);
    u.gold_dialog = std::move(dialog);
    return u;
  };
  ChatLog log({make("u1", "`a` `b` `c` ok", "heavy"), make("u2", "fine words here", "light"),
               make("u3", "http://a.io", "heavy")});
  ChatLog filtered = DropPlaceholderHeavyDialogs(Preprocess(log).log, 0.5);
  ASSERT_EQ(filtered.size(), 1u);
  EXPECT_EQ(filtered[0].id, "u2");
}

}  // namespace
}  // namespace untangle
