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

#include "untangle/stats.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>
#include <utility>

#include "untangle/csv.h"

namespace untangle {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double BetaContinuedFraction(double x, double a, double b) {
  constexpr int kMaxIterations = 100000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

double Mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double SumSquaredDeviation(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss;
}

double MaxAbs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Spread below this is treated as exactly zero: it is rounding noise, e.g.
// x - (x + 5) for non-representable x.
bool NegligibleSpread(double sum_squares, std::size_t n, double scale) {
  double sd = std::sqrt(sum_squares / static_cast<double>(n));
  return sd <= 64.0 * kEps * std::max(scale, 1.0);
}

void RequireEqualLengths(std::span<const double> x, std::span<const double> y,
                         std::size_t min_size, const char* what) {
  if (x.size() != y.size()) {
    throw DomainError(std::string(what) + ": inputs differ in length");
  }
  if (x.size() < min_size) {
    throw DomainError(std::string(what) + ": needs at least " +
                      std::to_string(min_size) + " values");
  }
}

}  // namespace

double NormalizeSatisfaction(int score) {
  if (score < 1 || score > 5) {
    throw DomainError("satisfaction score " + std::to_string(score) +
                      " outside 1..5");
  }
  return 0.25 * (score - 1);
}

double RegularizedIncompleteBeta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("incomplete beta needs positive shape parameters");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("incomplete beta argument outside [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fast for x < (a + 1) / (a + b + 2);
  // otherwise use the symmetry I_x(a, b) = 1 - I_{1-x}(b, a).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::clamp(front * BetaContinuedFraction(x, a, b) / a, 0.0, 1.0);
  }
  return std::clamp(1.0 - front * BetaContinuedFraction(1.0 - x, b, a) / b,
                    0.0, 1.0);
}

double StudentTwoSidedP(double t, double df) {
  if (std::isnan(t)) throw DomainError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return RegularizedIncompleteBeta(df / (df + t * t), 0.5 * df, 0.5);
}

double FUpperP(double f, double d1, double d2) {
  if (std::isnan(f)) throw DomainError("F statistic is NaN");
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  return RegularizedIncompleteBeta(d2 / (d2 + d1 * f), 0.5 * d2, 0.5 * d1);
}

ErrorStats RmseMae(std::span<const double> x, std::span<const double> y) {
  RequireEqualLengths(x, y, 1, "rmse/mae");
  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    se += d * d;
    ae += std::abs(d);
  }
  const double n = static_cast<double>(x.size());
  ErrorStats out{std::sqrt(se / n), ae / n};
  // Power-mean inequality; guards against last-bit rounding inversions.
  out.rmse = std::max(out.rmse, out.mae);
  return out;
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  RequireEqualLengths(x, y, 2, "pearson");
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
  const double sxx = SumSquaredDeviation(x, mx);
  const double syy = SumSquaredDeviation(y, my);
  if (NegligibleSpread(sxx, x.size(), MaxAbs(x)) ||
      NegligibleSpread(syy, y.size(), MaxAbs(y))) {
    throw UndefinedCorrelationError("correlation of a constant sample");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

TestResult IndependentTTest(std::span<const double> x,
                            std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) {
    throw DomainError("independent t-test needs two values per sample");
  }
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double m1 = Mean(x);
  const double m2 = Mean(y);
  const double ss = SumSquaredDeviation(x, m1) + SumSquaredDeviation(y, m2);
  TestResult r;
  r.df1 = n1 + n2 - 2.0;
  const double scale = std::max(MaxAbs(x), MaxAbs(y));
  if (NegligibleSpread(ss, x.size() + y.size(), scale)) {
    bool equal = std::abs(m1 - m2) <= 64.0 * kEps * std::max(scale, 1.0);
    r.statistic = equal ? 0.0 : std::copysign(
                                    std::numeric_limits<double>::infinity(),
                                    m1 - m2);
    r.p = equal ? 1.0 : 0.0;
    return r;
  }
  const double pooled = ss / r.df1;
  r.statistic = (m1 - m2) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
  r.p = StudentTwoSidedP(r.statistic, r.df1);
  return r;
}

TestResult PairedTTest(std::span<const double> x, std::span<const double> y) {
  RequireEqualLengths(x, y, 2, "paired t-test");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
  const double n = static_cast<double>(z.size());
  const double mz = Mean(z);
  const double ss = SumSquaredDeviation(z, mz);
  TestResult r;
  r.df1 = n - 1.0;
  const double scale = std::max(MaxAbs(x), MaxAbs(y));
  if (NegligibleSpread(ss, z.size(), scale)) {
    bool zero = std::abs(mz) <= 64.0 * kEps * std::max(scale, 1.0);
    r.statistic = zero ? 0.0
                       : std::copysign(std::numeric_limits<double>::infinity(),
                                       mz);
    r.p = zero ? 1.0 : 0.0;
    return r;
  }
  const double sd = std::sqrt(ss / r.df1);
  r.statistic = mz / (sd / std::sqrt(n));
  r.p = StudentTwoSidedP(r.statistic, r.df1);
  return r;
}

TestResult OneWayAnova(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw DomainError("ANOVA needs at least two groups");
  std::size_t total = 0;
  double grand = 0.0;
  double scale = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) {
      throw DomainError("ANOVA needs at least two values per group");
    }
    total += g.size();
    for (double v : g) grand += v;
    scale = std::max(scale, MaxAbs(g));
  }
  grand /= static_cast<double>(total);
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    const double m = Mean(g);
    ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    ssw += SumSquaredDeviation(g, m);
  }
  TestResult r;
  r.df1 = static_cast<double>(groups.size() - 1);
  r.df2 = static_cast<double>(total - groups.size());
  const bool no_between = NegligibleSpread(ssb, total, scale);
  if (NegligibleSpread(ssw, total, scale)) {
    r.statistic = no_between ? 0.0 : std::numeric_limits<double>::infinity();
    r.p = no_between ? 1.0 : 0.0;
    return r;
  }
  r.statistic = no_between ? 0.0 : (ssb / r.df1) / (ssw / r.df2);
  r.p = FUpperP(r.statistic, r.df1, r.df2);
  return r;
}

double CohensKappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty()) {
    throw DomainError("kappa needs two non-empty rating vectors of equal length");
  }
  const double n = static_cast<double>(a.size());
  std::map<int, std::pair<double, double>> marginals;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    marginals[a[i]].first += 1.0;
    marginals[b[i]].second += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [category, counts] : marginals) {
    pe += (counts.first / n) * (counts.second / n);
  }
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

std::vector<SatisfactionRecord> ParseSatisfactionCsv(
    std::istream& in, const std::string& source_name) {
  std::vector<SatisfactionRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const CsvRow& row :
       ParseCsv(in, source_name, {"dialog_id", "rater_id", "score"})) {
    SatisfactionRecord r{row.fields[0], row.fields[1], 0};
    const std::string& text = row.fields[2];
    std::size_t used = 0;
    try {
      r.score = std::stoi(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) {
      throw ParseError(source_name, row.line, "score is not an integer");
    }
    if (r.score < 1 || r.score > 5) {
      throw ParseError(source_name, row.line, "score outside 1..5");
    }
    if (r.dialog_id.empty() || r.rater_id.empty()) {
      throw ParseError(source_name, row.line, "empty dialog_id or rater_id");
    }
    if (!seen.emplace(r.dialog_id, r.rater_id).second) {
      throw IntegrityError(source_name + ":" + std::to_string(row.line) +
                           ": repeated rating of " + r.dialog_id + " by " +
                           r.rater_id);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SatisfactionRecord> ReadSatisfactionCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ParseSatisfactionCsv(in, path);
}

std::map<std::string, double> MeanSatisfaction(
    std::span<const SatisfactionRecord> records) {
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& r : records) {
    auto& s = sums[r.dialog_id];
    s.first += NormalizeSatisfaction(r.score);
    s.second += 1;
  }
  std::map<std::string, double> out;
  for (const auto& [dialog, s] : sums) out[dialog] = s.first / s.second;
  return out;
}

std::optional<double> AverageRaterKappa(
    std::span<const SatisfactionRecord> records) {
  std::map<std::string, std::map<std::string, int>> by_rater;
  for (const auto& r : records) by_rater[r.rater_id][r.dialog_id] = r.score;
  double sum = 0.0;
  int pairs = 0;
  for (auto a = by_rater.begin(); a != by_rater.end(); ++a) {
    for (auto b = std::next(a); b != by_rater.end(); ++b) {
      std::vector<int> ra, rb;
      for (const auto& [dialog, score] : a->second) {
        auto it = b->second.find(dialog);
        if (it == b->second.end()) continue;
        ra.push_back(score);
        rb.push_back(it->second);
      }
      if (ra.empty()) continue;
      sum += CohensKappa(ra, rb);
      ++pairs;
    }
  }
  if (pairs == 0) return std::nullopt;
  return sum / pairs;
}

StatsReport DeviationReport(
    const std::map<std::string, double>& measure,
    const std::map<std::string, double>& satisfaction) {
  std::vector<double> x, y;
  for (const auto& [dialog, value] : measure) {
    auto it = satisfaction.find(dialog);
    if (it == satisfaction.end()) continue;
    x.push_back(value);
    y.push_back(it->second);
  }
  if (x.size() < 2) {
    throw InsufficientDataError(
        "deviation analysis needs at least two dialogs with both a measure "
        "value and a satisfaction score, found " +
        std::to_string(x.size()));
  }
  StatsReport report;
  report.n = x.size();
  ErrorStats err = RmseMae(x, y);
  report.rmse = err.rmse;
  report.mae = err.mae;
  try {
    report.pearson = Pearson(x, y);
  } catch (const UndefinedCorrelationError&) {
    report.pearson.reset();
  }
  report.ist = IndependentTTest(x, y);
  report.pst = PairedTTest(x, y);
  std::vector<std::vector<double>> groups = {x, y};
  report.anova = OneWayAnova(groups);
  return report;
}

}  // namespace untangle
