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
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "untangle/error.h"
#include "untangle/stats.h"

namespace untangle {
namespace {

// Reference values below were computed with mpmath's betainc at 50 digits,
// applied to statistics that were themselves evaluated in 50-digit
// arithmetic.
const std::vector<double> kX = {0.62, 0.71, 0.55, 0.80, 0.67, 0.74, 0.59, 0.69};
const std::vector<double> kY = {0.50, 0.75, 0.25, 1.00, 0.75, 0.50, 0.25, 0.75};

TEST(IncompleteBetaTest, MatchesHighPrecisionReference) {
  struct Case {
    double x, a, b, expected;
  };
  for (const Case& c : {Case{0.3, 2, 3, 0.3483},
                        Case{0.9, 0.5, 0.5, 0.79516723530086657191},
                        Case{0.05, 10, 0.5, 1.7611787432590982125e-14},
                        Case{0.999, 50, 2.5, 0.99983144594822339704},
                        Case{0.5, 200, 200, 0.5},
                        Case{1e-4, 0.5, 7, 0.029320307520326372777}}) {
    EXPECT_NEAR(RegularizedIncompleteBeta(c.x, c.a, c.b), c.expected, 1e-12)
        << c.x << " " << c.a << " " << c.b;
  }
  EXPECT_EQ(RegularizedIncompleteBeta(0.0, 2, 3), 0.0);
  EXPECT_EQ(RegularizedIncompleteBeta(1.0, 2, 3), 1.0);
  EXPECT_THROW(RegularizedIncompleteBeta(0.5, 0.0, 1.0), DomainError);
  EXPECT_THROW(RegularizedIncompleteBeta(1.5, 1.0, 1.0), DomainError);
}

TEST(IncompleteBetaTest, SymmetryAndMonotonicity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> shape(0.1, 40.0), unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    double a = shape(rng), b = shape(rng), x = unit(rng);
    double v = RegularizedIncompleteBeta(x, a, b);
    EXPECT_NEAR(v, 1.0 - RegularizedIncompleteBeta(1.0 - x, b, a), 1e-12);
    EXPECT_LE(RegularizedIncompleteBeta(x * 0.9, a, b), v + 1e-15);
  }
}

TEST(StudentPTest, MatchesReference) {
  EXPECT_NEAR(StudentTwoSidedP(2.0, 5), 0.10193947882985835625, 1e-12);
  EXPECT_NEAR(StudentTwoSidedP(-0.5, 1), 0.70483276469913345165, 1e-12);
  EXPECT_NEAR(StudentTwoSidedP(10.0, 30), 4.5752514082296131926e-11, 1e-18);
  EXPECT_NEAR(StudentTwoSidedP(3.5, 100), 0.00069642771735626891986, 1e-12);
  EXPECT_EQ(StudentTwoSidedP(0.0, 7), 1.0);
}

TEST(TTestTest, IndependentMatchesReference) {
  TestResult r = IndependentTTest(kX, kY);
  EXPECT_NEAR(r.statistic, 0.78975170514740104697, 1e-12);
  EXPECT_NEAR(r.p, 0.44284411279329691317, 1e-9);
  EXPECT_EQ(r.df1, 14.0);
}

TEST(TTestTest, PairedMatchesReference) {
  TestResult r = PairedTTest(kX, kY);
  EXPECT_NEAR(r.statistic, 1.0937716741583588322, 1e-12);
  EXPECT_NEAR(r.p, 0.3102591034733104961, 1e-9);
  EXPECT_EQ(r.df1, 7.0);
}

TEST(AnovaTest, MatchesReference) {
  std::vector<std::vector<double>> groups = {
      {0.2, 0.4, 0.3, 0.5}, {0.6, 0.7, 0.5, 0.9, 0.8}, {0.1, 0.3, 0.2}};
  TestResult r = OneWayAnova(groups);
  EXPECT_NEAR(r.statistic, 14.272058823529411765, 1e-10);
  EXPECT_NEAR(r.p, 0.0016167867190023659982, 1e-12);
  EXPECT_EQ(r.df1, 2.0);
  EXPECT_EQ(r.df2, 9.0);
}

TEST(AnovaTest, TwoGroupsAgreeWithIndependentTTest) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.5, 0.2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(2 + rng() % 15), b(2 + rng() % 15);
    for (double& v : a) v = normal(rng);
    for (double& v : b) v = normal(rng) + 0.1;
    std::vector<std::vector<double>> groups = {a, b};
    TestResult f = OneWayAnova(groups);
    TestResult t = IndependentTTest(a, b);
    EXPECT_NEAR(f.p, t.p, 1e-9);
    EXPECT_NEAR(f.statistic, t.statistic * t.statistic, 1e-9 * (1 + f.statistic));
    EXPECT_GE(t.p, 0.0);
    EXPECT_LE(t.p, 1.0);
  }
}

TEST(TTestTest, DegenerateVariance) {
  std::vector<double> a = {0.5, 0.5, 0.5};
  EXPECT_EQ(IndependentTTest(a, a).p, 1.0);
  EXPECT_EQ(PairedTTest(a, a).p, 1.0);
  std::vector<double> b = {0.75, 0.75, 0.75};
  EXPECT_EQ(IndependentTTest(a, b).p, 0.0);
  // Constant non-zero differences.
  std::vector<double> c = {0.1, 0.2, 0.3}, d = {0.2, 0.3, 0.4};
  EXPECT_EQ(PairedTTest(c, d).p, 0.0);
}

TEST(ErrorStatsTest, RmseAtLeastMae) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(1 + rng() % 20), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = unit(rng);
      y[i] = unit(rng);
    }
    ErrorStats e = RmseMae(x, y);
    EXPECT_GE(e.rmse, e.mae);
  }
  ErrorStats e = RmseMae(kX, kY);
  EXPECT_NEAR(e.rmse, 0.20285462775100793, 1e-15);
  EXPECT_NEAR(e.mae, 0.1725, 1e-15);
}

TEST(PearsonTest, ValueAndAffineInvariance) {
  EXPECT_NEAR(Pearson(kX, kY), 0.8477776573586676, 1e-13);
  std::vector<double> scaled;
  for (double v : kY) scaled.push_back(3.5 * v - 2.0);
  EXPECT_NEAR(Pearson(kX, scaled), Pearson(kX, kY), 1e-10);
  EXPECT_THROW(Pearson(kX, std::vector<double>(kX.size(), 0.4)),
               UndefinedCorrelationError);
  EXPECT_THROW(Pearson(std::vector<double>{1}, std::vector<double>{2}), DomainError);
}

TEST(KappaTest, AgreementAndAntiAgreement) {
  std::vector<int> a = {1, 2, 3, 2, 1, 3};
  EXPECT_EQ(CohensKappa(a, a), 1.0);
  std::vector<int> b = {1, 1, 2, 2}, c = {2, 2, 1, 1};
  EXPECT_EQ(CohensKappa(b, c), -1.0);
  std::vector<int> one = {4, 4, 4};
  EXPECT_EQ(CohensKappa(one, one), 1.0);
}

TEST(KappaTest, ChanceLevelAveragesNearZero) {
  std::mt19937_64 rng(4);
  double sum = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> a(100), b(100);
    for (int i = 0; i < 100; ++i) {
      a[i] = static_cast<int>(rng() % 3);
      b[i] = static_cast<int>(rng() % 3);
    }
    sum += CohensKappa(a, b);
  }
  EXPECT_NEAR(sum / 1000, 0.0, 0.05);
}

TEST(SatisfactionTest, Normalization) {
  EXPECT_EQ(NormalizeSatisfaction(1), 0.0);
  EXPECT_EQ(NormalizeSatisfaction(3), 0.5);
  EXPECT_EQ(NormalizeSatisfaction(5), 1.0);
  EXPECT_EQ(NormalizeSatisfaction(2), 0.25);
  EXPECT_THROW(NormalizeSatisfaction(0), DomainError);
  EXPECT_THROW(NormalizeSatisfaction(6), DomainError);
}

TEST(SatisfactionTest, ParsesCsvAndAverages) {
  std::stringstream in(
      "dialog_id,rater_id,score\n"
      "d1,r1,5\n"
      "d1,r2,3\n"
      "\n"
      "\"d2\", r1 ,1\n");
  auto records = ParseSatisfactionCsv(in, "s.csv");
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[2].dialog_id, "d2");
  EXPECT_EQ(records[2].rater_id, "r1");
  auto means = MeanSatisfaction(records);
  EXPECT_EQ(means.at("d1"), 0.75);
  EXPECT_EQ(means.at("d2"), 0.0);
}

TEST(SatisfactionTest, RejectsBadRows) {
  auto parse = [](const std::string& body) {
    std::stringstream in("dialog_id,rater_id,score\n" + body);
    return ParseSatisfactionCsv(in, "s.csv");
  };
  EXPECT_THROW(parse("d1,r1,7\n"), ParseError);
  EXPECT_THROW(parse("d1,r1,x\n"), ParseError);
  EXPECT_THROW(parse("d1,r1\n"), ParseError);
  EXPECT_THROW(parse("d1,r1,3\nd1,r1,4\n"), IntegrityError);
  std::stringstream bad_header("dialog,rater,score\n");
  EXPECT_THROW(ParseSatisfactionCsv(bad_header, "s.csv"), ParseError);
}

TEST(SatisfactionTest, AverageKappaOverRaterPairs) {
  std::vector<SatisfactionRecord> r = {
      {"d1", "a", 1}, {"d2", "a", 1}, {"d3", "a", 2}, {"d4", "a", 2},
      {"d1", "b", 2}, {"d2", "b", 2}, {"d3", "b", 1}, {"d4", "b", 1},
      {"d1", "c", 1}, {"d2", "c", 1}, {"d3", "c", 2}, {"d4", "c", 2}};
  // a-b: -1, a-c: 1, b-c: -1.
  EXPECT_NEAR(*AverageRaterKappa(r), -1.0 / 3.0, 1e-15);
  std::vector<SatisfactionRecord> single = {{"d1", "a", 3}};
  EXPECT_FALSE(AverageRaterKappa(single).has_value());
}

TEST(DeviationReportTest, IdenticalValues) {
  std::map<std::string, double> m = {{"a", 0.2}, {"b", 0.5}, {"c", 0.9}};
  StatsReport r = DeviationReport(m, m);
  EXPECT_EQ(r.n, 3u);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.mae, 0.0);
  ASSERT_TRUE(r.pearson.has_value());
  EXPECT_NEAR(*r.pearson, 1.0, 1e-15);
  EXPECT_EQ(r.ist.p, 1.0);
  EXPECT_EQ(r.pst.p, 1.0);
}

TEST(DeviationReportTest, DisjointKeysAreInsufficient) {
  std::map<std::string, double> a = {{"a", 0.2}, {"b", 0.5}};
  std::map<std::string, double> b = {{"c", 0.2}, {"d", 0.5}};
  EXPECT_THROW(DeviationReport(a, b), InsufficientDataError);
}

TEST(DeviationReportTest, TwentyDialogFixtureMatchesComposedOracles) {
  std::map<std::string, double> measure, satisfaction;
  std::vector<double> x, y;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    std::string id = "d" + std::to_string(100 + i);
    double v = unit(rng), s = 0.25 * static_cast<double>(rng() % 5);
    measure[id] = v;
    satisfaction[id] = s;
    x.push_back(v);
    y.push_back(s);
  }
  measure["only-measure"] = 0.5;
  satisfaction["only-satisfaction"] = 0.5;
  StatsReport r = DeviationReport(measure, satisfaction);
  EXPECT_EQ(r.n, 20u);
  EXPECT_EQ(r.rmse, RmseMae(x, y).rmse);
  EXPECT_EQ(*r.pearson, Pearson(x, y));
  EXPECT_EQ(r.ist.p, IndependentTTest(x, y).p);
  EXPECT_EQ(r.pst.p, PairedTTest(x, y).p);
  EXPECT_NEAR(r.anova.p, r.ist.p, 1e-9);
}

TEST(DeviationReportTest, ConstantSideLeavesPearsonEmpty) {
  std::map<std::string, double> m = {{"a", 0.2}, {"b", 0.5}, {"c", 0.9}};
  std::map<std::string, double> s = {{"a", 0.5}, {"b", 0.5}, {"c", 0.5}};
  EXPECT_FALSE(DeviationReport(m, s).pearson.has_value());
}

}  // namespace
}  // namespace untangle
