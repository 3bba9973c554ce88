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

// Deviation analysis between a quality measure and human satisfaction
// scores: error (RMSE, MAE), correlation (Pearson), hypothesis tests
// (independent and paired t-tests, one-way ANOVA) and inter-rater agreement
// (Cohen's kappa). p-values come from a continued-fraction regularized
// incomplete beta function.

#ifndef UNTANGLE_STATS_H_
#define UNTANGLE_STATS_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "untangle/error.h"

namespace untangle {

class UndefinedCorrelationError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Likert score 1..5 -> 0.25 (score - 1). Throws DomainError otherwise.
double NormalizeSatisfaction(int score);

// I_x(a, b) for a, b > 0 and x in [0, 1].
double RegularizedIncompleteBeta(double x, double a, double b);

// Two-sided p-value of Student's t with `df` degrees of freedom.
double StudentTwoSidedP(double t, double df);

// Upper-tail p-value of an F(d1, d2) statistic.
double FUpperP(double f, double d1, double d2);

struct ErrorStats {
  double rmse = 0.0;
  double mae = 0.0;
};

// Throws DomainError on empty or unequal-length input.
ErrorStats RmseMae(std::span<const double> x, std::span<const double> y);

// Sample correlation. Throws DomainError for unequal lengths or fewer than
// two points, UndefinedCorrelationError when either input is constant.
double Pearson(std::span<const double> x, std::span<const double> y);

struct TestResult {
  double statistic = 0.0;  // t or F
  double p = 1.0;
  double df1 = 0.0;
  double df2 = 0.0;  // ANOVA only
};

// Pooled-variance two-sample t-test, df = n1 + n2 - 2. Zero pooled variance
// gives p = 1 for equal means and p = 0 otherwise.
TestResult IndependentTTest(std::span<const double> x,
                            std::span<const double> y);

// One-sample t-test of x - y against 0, df = n - 1. Constant zero
// differences give p = 1, constant non-zero differences p = 0.
TestResult PairedTTest(std::span<const double> x, std::span<const double> y);

// One-way ANOVA, F = MS_between / MS_within. Needs at least two groups of at
// least two values each.
TestResult OneWayAnova(std::span<const std::vector<double>> groups);

// (p_o - p_e) / (1 - p_e); 1 when both raters use a single shared category.
double CohensKappa(std::span<const int> a, std::span<const int> b);

struct SatisfactionRecord {
  std::string dialog_id;
  std::string rater_id;
  int score = 0;
};

// CSV with header dialog_id,rater_id,score. Throws ParseError on malformed
// rows or scores outside 1..5 and IntegrityError on a repeated
// (dialog_id, rater_id).
std::vector<SatisfactionRecord> ReadSatisfactionCsv(const std::string& path);
std::vector<SatisfactionRecord> ParseSatisfactionCsv(
    std::istream& in, const std::string& source_name);

// Mean normalized score per dialog.
std::map<std::string, double> MeanSatisfaction(
    std::span<const SatisfactionRecord> records);

// Mean kappa over rater pairs that scored at least one common dialog;
// nullopt when no such pair exists.
std::optional<double> AverageRaterKappa(
    std::span<const SatisfactionRecord> records);

struct StatsReport {
  std::size_t n = 0;
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> pearson;  // absent when either side is constant
  TestResult ist;
  TestResult pst;
  TestResult anova;
  std::optional<double> kappa;
};

// Aligns both maps on their common dialogs. Throws InsufficientDataError
// when fewer than two dialogs are shared.
StatsReport DeviationReport(const std::map<std::string, double>& measure,
                            const std::map<std::string, double>& satisfaction);

}  // namespace untangle

#endif  // UNTANGLE_STATS_H_
