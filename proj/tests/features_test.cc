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


#include <cmath>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "testing/synthetic.h"
#include "untangle/error.h"
#include "untangle/features.h"
#include "untangle/text.h"

namespace untangle {
namespace {

using S = FeatureSlot;

Utterance Tok(std::string id, std::int64_t ts, std::string author,
              std::vector<std::string> tokens, std::string text = "") {
  Utterance u;
  u.id = std::move(id);
  u.timestamp = ts;
  u.author = std::move(author);
  u.norm_tokens = std::move(tokens);
  u.raw_text = text;
  return u;
}

// Dense tf-idf cosine over the full vocabulary, computed from scratch.
double DenseCosine(const std::vector<std::vector<std::string>>& docs,
                   std::size_t a, std::size_t b) {
  std::map<std::string, int> df;
  for (const auto& d : docs) {
    for (const auto& t : std::set<std::string>(d.begin(), d.end())) ++df[t];
  }
  std::vector<std::string> terms;
  for (const auto& [t, n] : df) {
    if (n >= 2) terms.push_back(t);
  }
  const double n = static_cast<double>(docs.size());
  auto vec = [&](const std::vector<std::string>& d) {
    std::vector<double> v;
    for (const auto& t : terms) {
      double tf = 0;
      for (const auto& x : d) tf += (x == t);
      v.push_back(tf * (std::log((1 + n) / (1 + df[t])) + 1));
    }
    return v;
  };
  auto va = vec(docs[a]), vb = vec(docs[b]);
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

TEST(VocabularyTest, DocumentFrequencies) {
  ChatLog log({Tok("1", 0, "x", {"a", "b"}), Tok("2", 1, "x", {"a", "c"})});
  Vocabulary v = Vocabulary::Build(log);
  ASSERT_NE(v.Find("a"), nullptr);
  EXPECT_EQ(v.Find("a")->df, 2u);
  EXPECT_EQ(v.Find("b"), nullptr);
  EXPECT_EQ(v.Find("c"), nullptr);
  EXPECT_EQ(v.size(), 1u);
}

TEST(VocabularyTest, EmptyLog) { EXPECT_EQ(Vocabulary::Build(ChatLog()).size(), 0u); }

TEST(VocabularyTest, CountsDocumentsNotOccurrences) {
  ChatLog log({Tok("1", 0, "x", {"a", "a"}), Tok("2", 1, "x", {"a"})});
  EXPECT_EQ(Vocabulary::Build(log).Find("a")->df, 2u);
}

TEST(TfidfCosineTest, SelfSimilarityAndOrthogonality) {
  ChatLog log({Tok("1", 0, "x", {"a", "b", "a"}), Tok("2", 1, "x", {"a", "b"}),
               Tok("3", 2, "x", {"c", "d"}), Tok("4", 3, "x", {"c", "d"})});
  Vocabulary v = Vocabulary::Build(log);
  EXPECT_NEAR(TfidfCosine(log[0], log[0], v), 1.0, 1e-12);
  EXPECT_EQ(TfidfCosine(log[0], log[2], v), 0.0);
}

TEST(TfidfCosineTest, MatchesDenseOracle) {
  std::vector<std::vector<std::string>> docs = {
      {"a", "b"}, {"a", "c"}, {"b", "c", "c"}, {"a", "b", "d"}, {"d", "e"}};
  std::vector<Utterance> us;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    us.push_back(Tok("u" + std::to_string(i), static_cast<std::int64_t>(i), "x", docs[i]));
  }
  ChatLog log(us);
  Vocabulary v = Vocabulary::Build(log);
  for (std::size_t a = 0; a < docs.size(); ++a) {
    for (std::size_t b = 0; b < docs.size(); ++b) {
      EXPECT_NEAR(TfidfCosine(log[a], log[b], v), DenseCosine(docs, a, b), 1e-12)
          << a << "," << b;
    }
  }
}

TEST(TfidfCosineTest, RandomDocumentsMatchDenseOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<std::string>> docs(8);
    std::vector<Utterance> us;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      for (int k = static_cast<int>(rng() % 6); k > 0; --k) {
        docs[i].push_back(std::string(1, static_cast<char>('a' + rng() % 7)));
      }
      us.push_back(Tok("u" + std::to_string(i), static_cast<std::int64_t>(i), "x", docs[i]));
    }
    ChatLog log(us);
    Vocabulary v = Vocabulary::Build(log);
    for (std::size_t a = 0; a < docs.size(); ++a) {
      for (std::size_t b = 0; b < docs.size(); ++b) {
        ASSERT_NEAR(TfidfCosine(log[a], log[b], v), DenseCosine(docs, a, b), 1e-12);
      }
    }
  }
}

TEST(PairFeaturesTest, SelfLink) {
  ChatLog log({Tok("1", 0, "alice", {"hi"}, "hi?")});
  PairFeatureExtractor ex(log, 50);
  LinkFeatureVector f = ex.Extract(0, 0);
  EXPECT_EQ(f[S::kSelfLink], 1.0);
  EXPECT_EQ(f[S::kSameAuthor], 1.0);
  for (S s : {S::kTimeGapLog, S::kGapUnder60s, S::kGapUnder300s, S::kGapUnder3600s,
              S::kGapUnder86400s, S::kGapAtLeast86400s, S::kDistance,
              S::kSharedWords, S::kTfidfCosine}) {
    EXPECT_EQ(f[s], 0.0);
  }
  EXPECT_EQ(f[S::kChildHasQuestion], 1.0);
}

TEST(PairFeaturesTest, SameAuthorShortGap) {
  ChatLog log({Tok("1", 100, "bob", {"x"}), Tok("2", 130, "bob", {"y"})});
  LinkFeatureVector f = PairFeatureExtractor(log, 50).Extract(0, 1);
  EXPECT_EQ(f[S::kSameAuthor], 1.0);
  EXPECT_EQ(f[S::kSelfLink], 0.0);
  EXPECT_EQ(f[S::kGapUnder60s], 1.0);
  EXPECT_EQ(f[S::kGapUnder300s], 0.0);
  EXPECT_DOUBLE_EQ(f[S::kTimeGapLog], std::log1p(30.0) / std::log1p(86400.0));
}

TEST(PairFeaturesTest, GapBucketBoundaries) {
  struct Case {
    std::int64_t gap;
    S hot;
  };
  for (const Case& c : {Case{59, S::kGapUnder60s}, Case{60, S::kGapUnder300s},
                        Case{299, S::kGapUnder300s}, Case{300, S::kGapUnder3600s},
                        Case{3600, S::kGapUnder86400s}, Case{86399, S::kGapUnder86400s},
                        Case{86400, S::kGapAtLeast86400s}, Case{500000, S::kGapAtLeast86400s}}) {
    ChatLog log({Tok("1", 0, "a", {}), Tok("2", c.gap, "b", {})});
    LinkFeatureVector f = PairFeatureExtractor(log, 50).Extract(0, 1);
    double hot_sum = 0;
    for (S s : {S::kGapUnder60s, S::kGapUnder300s, S::kGapUnder3600s,
                S::kGapUnder86400s, S::kGapAtLeast86400s}) {
      hot_sum += f[s];
    }
    EXPECT_EQ(hot_sum, 1.0) << c.gap;
    EXPECT_EQ(f[c.hot], 1.0) << c.gap;
  }
}

TEST(PairFeaturesTest, DistanceAndSharedWords) {
  std::vector<Utterance> us = {Tok("0", 0, "a", {"deploy", "fail", "the", "log"})};
  for (int i = 1; i <= 4; ++i) us.push_back(Tok(std::to_string(i), i, "c", {"noise"}));
  us.push_back(Tok("5", 9, "b", {"the", "deploy", "log", "!"}));
  ChatLog log(us);
  LinkFeatureVector f = PairFeatureExtractor(log, 8).Extract(0, 5);
  EXPECT_DOUBLE_EQ(f[S::kDistance], 4.0 / 8.0);
  // "the" is a stopword and "!" has no letters.
  EXPECT_DOUBLE_EQ(f[S::kSharedWords], 2.0 / 5.0);
  EXPECT_EQ(f[S::kHasSharedWord], 1.0);
  EXPECT_EQ(PairFeatureExtractor(log, 2).Extract(0, 5)[S::kDistance], 1.0);
}

TEST(PairFeaturesTest, ParentAfterChildIsAnOrderingError) {
  ChatLog log({Tok("1", 0, "a", {}), Tok("2", 1, "b", {})});
  EXPECT_THROW(PairFeatureExtractor(log, 5).Extract(1, 0), OrderingError);
}

// Mention rule oracle: the name as a whole token, where tokens are maximal
// runs of [A-Za-z0-9_-], compared case-insensitively.
bool RegexMention(const std::string& text, const std::string& name) {
  std::string escaped;
  for (char c : name) {
    if (std::string("\\^$.|?*+()[]{}-").find(c) != std::string::npos) escaped += '\\';
    escaped += c;
  }
  std::regex re("(^|[^A-Za-z0-9_-])" + escaped + "($|[^A-Za-z0-9_-])",
                std::regex::icase);
  return std::regex_search(text, re);
}

TEST(MentionTest, ChildMentionsParentAuthor) {
  ChatLog log({Tok("1", 0, "alice", {}, "anyone?"), Tok("2", 5, "bob", {}, "@alice sure")});
  LinkFeatureVector f = PairFeatureExtractor(log, 50).Extract(0, 1);
  EXPECT_EQ(f[S::kChildMentionsParentAuthor], 1.0);
  EXPECT_EQ(f[S::kParentMentionsChildAuthor], 0.0);
}

TEST(MentionTest, AgreesWithRegexOracle) {
  const std::vector<std::string> texts = {
      "@alice sure", "thanks Alice!", "malice aforethought", "alice_b said",
      "alice-b said", "ALICE", "ping alice.", "alicealice", "x alice", "",
      "al ice", "@bob-2 hi", "bob-2", "bob-23", "hey bob.2"};
  for (const auto& name : {"alice", "bob-2", "al"}) {
    for (const auto& t : texts) {
      EXPECT_EQ(MentionsName(t, name), RegexMention(t, name)) << t << " / " << name;
    }
  }
}

TEST(PairFeaturesTest, BoundedFiniteAndDeterministicOnRandomLog) {
  ChatLog log = testing::SyntheticLog(300, 17);
  PairFeatureExtractor a(log, 50), b(log, 50);
  for (std::size_t child = 0; child < log.size(); ++child) {
    std::size_t first = child >= 50 ? child - 50 : 0;
    for (std::size_t parent = first; parent <= child; ++parent) {
      LinkFeatureVector f = a.Extract(parent, child);
      ASSERT_EQ(f, b.Extract(parent, child));
      for (double v : f.values) {
        ASSERT_TRUE(std::isfinite(v));
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
    }
  }
}

TEST(SchemaTest, NamesMatchDimension) {
  EXPECT_EQ(FeatureNames().size(), kFeatureDim);
  std::set<std::string_view> distinct(FeatureNames().begin(), FeatureNames().end());
  EXPECT_EQ(distinct.size(), kFeatureDim);
}

}  // namespace
}  // namespace untangle
