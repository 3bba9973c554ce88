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

#include "untangle/measures.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "untangle/error.h"

namespace untangle {
namespace {

double Choose2(std::size_t n) {
  double x = static_cast<double>(n);
  return x * (x - 1.0) / 2.0;
}

double Entropy(const std::vector<double>& probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

void CheckSameCoverage(const Partition& gold, const Partition& pred) {
  if (gold.utterance_count() != pred.utterance_count()) {
    throw EvaluationDomainError(
        "gold covers " + std::to_string(gold.utterance_count()) +
        " utterances, prediction covers " +
        std::to_string(pred.utterance_count()));
  }
  for (const auto& id : gold.order()) {
    if (!pred.DialogOf(id)) {
      throw EvaluationDomainError("utterance " + id +
                                  " is missing from the prediction");
    }
  }
}

ContingencyTable::ContingencyTable(const Partition& gold,
                                   const Partition& pred) {
  CheckSameCoverage(gold, pred);
  // Rows and columns are numbered by first appearance in the gold order, so
  // the table (and every sum over it) ignores dialog order and ids.
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> row_of(gold.size(), kUnset);
  std::vector<std::size_t> col_of(pred.size(), kUnset);
  for (const auto& id : gold.order()) {
    std::size_t g = *gold.DialogOf(id);
    std::size_t p = *pred.DialogOf(id);
    if (row_of[g] == kUnset) {
      row_of[g] = row_dialog_.size();
      row_dialog_.push_back(g);
    }
    if (col_of[p] == kUnset) {
      col_of[p] = col_dialog_.size();
      col_dialog_.push_back(p);
    }
  }
  row_sums_.assign(row_dialog_.size(), 0);
  col_sums_.assign(col_dialog_.size(), 0);
  cells_.assign(row_sums_.size() * col_sums_.size(), 0);
  for (const auto& id : gold.order()) {
    std::size_t i = row_of[*gold.DialogOf(id)];
    std::size_t j = col_of[*pred.DialogOf(id)];
    ++cells_[i * col_sums_.size() + j];
    ++row_sums_[i];
    ++col_sums_[j];
    ++total_;
  }
}

double AdjustedRandIndex(const Partition& gold, const Partition& pred) {
  ContingencyTable t(gold, pred);
  double index = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) index += Choose2(t.at(i, j));
  }
  double rows = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) rows += Choose2(t.row_sum(i));
  double cols = 0.0;
  for (std::size_t j = 0; j < t.cols(); ++j) cols += Choose2(t.col_sum(j));
  double pairs = Choose2(t.total());
  if (pairs == 0.0) return 1.0;
  double expected = rows * cols / pairs;
  double max_index = 0.5 * (rows + cols);
  double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double NormalizedMutualInformation(const Partition& gold,
                                   const Partition& pred) {
  ContingencyTable t(gold, pred);
  if (t.total() == 0) return 1.0;
  const double n = static_cast<double>(t.total());
  std::vector<double> pa, pb;
  for (std::size_t i = 0; i < t.rows(); ++i) pa.push_back(t.row_sum(i) / n);
  for (std::size_t j = 0; j < t.cols(); ++j) pb.push_back(t.col_sum(j) / n);
  double ha = Entropy(pa);
  double hb = Entropy(pb);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      double nij = static_cast<double>(t.at(i, j));
      if (nij == 0.0) continue;
      mi += nij / n *
            std::log(n * nij /
                     (static_cast<double>(t.row_sum(i)) * t.col_sum(j)));
    }
  }
  return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

double ExactMatchF1(const Partition& gold, const Partition& pred) {
  CheckSameCoverage(gold, pred);
  if (gold.size() == 0 && pred.size() == 0) return 1.0;
  // Same-sized dialogs with a full overlap are equal as sets.
  ContingencyTable t(gold, pred);
  std::size_t matched = 0;
  for (std::size_t j = 0; j < t.cols(); ++j) {
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (t.at(i, j) == t.col_sum(j) && t.row_sum(i) == t.col_sum(j)) {
        ++matched;
        break;
      }
    }
  }
  if (matched == 0) return 0.0;
  double precision = static_cast<double>(matched) / pred.size();
  double recall = static_cast<double>(matched) / gold.size();
  return 2.0 * precision * recall / (precision + recall);
}

double ShenF(const Partition& gold, const Partition& pred) {
  ContingencyTable t(gold, pred);
  if (t.total() == 0) return 1.0;
  double score = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < t.cols(); ++j) {
      double nij = static_cast<double>(t.at(i, j));
      if (nij == 0.0) continue;
      // Harmonic mean of nij/|P_j| and nij/|D_i|.
      double f = 2.0 * nij / static_cast<double>(t.row_sum(i) + t.col_sum(j));
      best = std::max(best, f);
    }
    score += static_cast<double>(t.row_sum(i)) * best;
  }
  return std::min(score / static_cast<double>(t.total()), 1.0);
}

void DldParams::Validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw DomainError("eta must be a positive finite number");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("lambda must lie in [0, 1]");
  }
}

std::size_t DialogDelta(const std::vector<std::string>& a,
                        const std::vector<std::string>& b) {
  std::unordered_set<std::string> sa(a.begin(), a.end());
  std::unordered_set<std::string> sb(b.begin(), b.end());
  std::size_t delta = 0;
  for (const auto& x : sa) delta += sb.contains(x) ? 0 : 1;
  for (const auto& x : sb) delta += sa.contains(x) ? 0 : 1;
  return delta;
}

double RevisionSigmoid(double delta, double eta) {
  return 1.0 / (1.0 + std::exp(delta - eta));
}

DldResult DialogLevenshtein(const Partition& gold, const Partition& pred,
                            const DldParams& params) {
  params.Validate();
  ContingencyTable t(gold, pred);
  DldResult result;
  if (t.rows() == 0) {
    result.dld = result.dlr_v = result.dlr_t = 1.0;
    return result;
  }

  // Pairs with equal delta (resp. equal reduced revision ratio) contribute
  // identical terms, so the means are accumulated per group with weight
  // count / pairs. A perfect prediction then scores exactly
  // lambda + (1 - lambda) sigma(0).
  std::map<std::size_t, std::size_t> by_delta;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> by_ratio;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    std::size_t best = t.cols();
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (t.at(i, j) == 0) continue;
      if (best == t.cols() || t.at(i, j) > t.at(i, best) ||
          (t.at(i, j) == t.at(i, best) &&
           t.col_sum(j) < t.col_sum(best))) {
        best = j;
      }
    }
    DldPair pair;
    pair.gold_index = t.row_dialog(i);
    pair.pred_index = t.col_dialog(best);
    pair.gold_dialog = gold.dialogs()[pair.gold_index].id;
    pair.pred_dialog = pred.dialogs()[pair.pred_index].id;
    pair.gold_size = t.row_sum(i);
    pair.pred_size = t.col_sum(best);
    pair.overlap = t.at(i, best);
    pair.delta = pair.gold_size + pair.pred_size - 2 * pair.overlap;
    pair.sigmoid =
        RevisionSigmoid(static_cast<double>(pair.delta), params.eta);
    pair.ratio = 1.0 - static_cast<double>(pair.delta) /
                           static_cast<double>(pair.gold_size + pair.pred_size);
    std::size_t size_sum = pair.gold_size + pair.pred_size;
    std::size_t g = std::gcd(pair.delta, size_sum);
    ++by_delta[pair.delta];
    ++by_ratio[{pair.delta / g, size_sum / g}];
    result.pairs.push_back(std::move(pair));
  }

  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const DldPair& a, const DldPair& b) {
              return a.gold_index < b.gold_index;
            });
  const double count = static_cast<double>(result.pairs.size());
  for (const auto& [delta, n] : by_delta) {
    result.dlr_v += static_cast<double>(n) / count *
                    RevisionSigmoid(static_cast<double>(delta), params.eta);
  }
  for (const auto& [ratio, n] : by_ratio) {
    result.dlr_t += static_cast<double>(n) / count *
                    (1.0 - static_cast<double>(ratio.first) /
                               static_cast<double>(ratio.second));
  }
  result.dlr_v = std::clamp(result.dlr_v, 0.0, 1.0);
  result.dlr_t = std::clamp(result.dlr_t, 0.0, 1.0);
  result.dld =
      params.lambda * result.dlr_t + (1.0 - params.lambda) * result.dlr_v;
  return result;
}

double PerfectDld(const DldParams& params) {
  params.Validate();
  return params.lambda * 1.0 +
         (1.0 - params.lambda) * RevisionSigmoid(0.0, params.eta);
}

const char* MeasureName(Measure m) {
  switch (m) {
    case Measure::kAri:
      return "ari";
    case Measure::kNmi:
      return "nmi";
    case Measure::kShenF:
      return "shenf";
    case Measure::kF1:
      return "f1";
    case Measure::kDld:
      return "dld";
  }
  return "?";
}

Measure ParseMeasure(const std::string& name) {
  for (Measure m : AllMeasures()) {
    if (name == MeasureName(m)) return m;
  }
  throw DomainError("unknown measure \"" + name +
                    "\" (expected ari, nmi, shenf, f1 or dld)");
}

std::set<Measure> ParseMeasureList(const std::string& comma_list) {
  std::set<Measure> out;
  std::stringstream in(comma_list);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.insert(ParseMeasure(item));
  }
  if (out.empty()) throw DomainError("empty measure list");
  return out;
}

const std::set<Measure>& AllMeasures() {
  static const std::set<Measure> all = {Measure::kAri, Measure::kNmi,
                                        Measure::kShenF, Measure::kF1,
                                        Measure::kDld};
  return all;
}

MeasureReport Evaluate(const Partition& gold, const Partition& pred,
                       const DldParams& params,
                       const std::set<Measure>& measures) {
  params.Validate();
  CheckSameCoverage(gold, pred);
  MeasureReport report;
  report.measures = measures;
  report.params = params;
  if (measures.contains(Measure::kAri)) {
    report.ari = AdjustedRandIndex(gold, pred);
  }
  if (measures.contains(Measure::kNmi)) {
    report.nmi = NormalizedMutualInformation(gold, pred);
  }
  if (measures.contains(Measure::kShenF)) report.shen_f = ShenF(gold, pred);
  if (measures.contains(Measure::kF1)) report.f1 = ExactMatchF1(gold, pred);
  if (measures.contains(Measure::kDld)) {
    report.dld = DialogLevenshtein(gold, pred, params);
  }
  return report;
}

double DialogScores::Get(Measure m) const {
  switch (m) {
    case Measure::kAri:
      return ari;
    case Measure::kNmi:
      return nmi;
    case Measure::kShenF:
      return shen_f;
    case Measure::kF1:
      return f1;
    case Measure::kDld:
      return dld;
  }
  return 0.0;
}

std::vector<DialogScores> PerDialogScores(const Partition& gold,
                                          const Partition& pred,
                                          const DldParams& params) {
  DldResult pairing = DialogLevenshtein(gold, pred, params);
  std::vector<DialogScores> out;
  out.reserve(pairing.pairs.size());
  for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
    const DldPair& pair = pairing.pairs[i];
    const auto& gold_members = gold.dialogs()[pair.gold_index].members;
    const auto& pred_members = pred.dialogs()[pair.pred_index].members;
    std::unordered_set<std::string> neighbourhood(gold_members.begin(),
                                                  gold_members.end());
    neighbourhood.insert(pred_members.begin(), pred_members.end());
    Partition g = gold.RestrictTo(neighbourhood);
    Partition p = pred.RestrictTo(neighbourhood);
    DialogScores s;
    s.gold_dialog = pair.gold_dialog;
    s.pred_dialog = pair.pred_dialog;
    s.neighbourhood_size = neighbourhood.size();
    s.ari = AdjustedRandIndex(g, p);
    s.nmi = NormalizedMutualInformation(g, p);
    s.shen_f = ShenF(g, p);
    s.f1 = ExactMatchF1(g, p);
    s.dld = DialogLevenshtein(g, p, params).dld;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace untangle
