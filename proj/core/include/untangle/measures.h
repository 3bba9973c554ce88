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

// Disentanglement quality measures. Every measure compares a predicted
// partition with a gold partition over the same utterances and throws
// EvaluationDomainError when the covered utterance sets differ.
//
//   ARI     adjusted Rand index (pair counting), in [-1, 1]
//   NMI     2 MI / (H(gold) + H(pred)), natural logs
//   F1      exact-match F1 over dialogs whose member sets coincide
//   Shen-F  size-weighted best per-dialog F over gold dialogs
//   DLD     dialog Levenshtein distance: an edit-effort score per gold
//           dialog, combining a sigmoid of the revision count with the
//           revision ratio
//
// Matching is by member sets only; dialog ids and dialog order never affect
// a score.

#ifndef UNTANGLE_MEASURES_H_
#define UNTANGLE_MEASURES_H_

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "untangle/corpus.h"

namespace untangle {

// Gold x predicted overlap counts over a shared utterance set. Rows and
// columns follow the first appearance of each dialog in the gold utterance
// order, so earlier columns hold predicted dialogs that start earlier.
class ContingencyTable {
 public:
  // Throws EvaluationDomainError on a coverage mismatch.
  ContingencyTable(const Partition& gold, const Partition& pred);

  std::size_t rows() const { return row_sums_.size(); }
  std::size_t cols() const { return col_sums_.size(); }
  std::size_t at(std::size_t i, std::size_t j) const {
    return cells_[i * col_sums_.size() + j];
  }
  std::size_t row_sum(std::size_t i) const { return row_sums_[i]; }
  std::size_t col_sum(std::size_t j) const { return col_sums_[j]; }
  std::size_t total() const { return total_; }

  // Index into gold.dialogs() / pred.dialogs() of a row / column.
  std::size_t row_dialog(std::size_t i) const { return row_dialog_[i]; }
  std::size_t col_dialog(std::size_t j) const { return col_dialog_[j]; }

 private:
  std::vector<std::size_t> cells_;
  std::vector<std::size_t> row_sums_;
  std::vector<std::size_t> col_sums_;
  std::vector<std::size_t> row_dialog_;
  std::vector<std::size_t> col_dialog_;
  std::size_t total_ = 0;
};

// Throws EvaluationDomainError unless both partitions cover the same ids.
void CheckSameCoverage(const Partition& gold, const Partition& pred);

// 0/0 (identical trivial partitions) is defined as 1.
double AdjustedRandIndex(const Partition& gold, const Partition& pred);

// Identical zero-entropy partitions score 1; exactly one zero entropy
// scores 0.
double NormalizedMutualInformation(const Partition& gold,
                                   const Partition& pred);

// Singleton dialogs count like any other dialog.
double ExactMatchF1(const Partition& gold, const Partition& pred);

double ShenF(const Partition& gold, const Partition& pred);

struct DldParams {
  double eta = 5.0;     // revision count at which the sigmoid term is 1/2
  double lambda = 0.8;  // weight of the ratio term

  // Throws DomainError unless eta > 0 and 0 <= lambda <= 1.
  void Validate() const;
};

// |a - b| + |b - a|.
std::size_t DialogDelta(const std::vector<std::string>& a,
                        const std::vector<std::string>& b);

// 1 / (1 + exp(delta - eta)).
double RevisionSigmoid(double delta, double eta);

struct DldPair {
  std::size_t gold_index = 0;  // into gold.dialogs()
  std::size_t pred_index = 0;  // into pred.dialogs()
  std::string gold_dialog;
  std::string pred_dialog;
  std::size_t gold_size = 0;
  std::size_t pred_size = 0;
  std::size_t overlap = 0;
  std::size_t delta = 0;
  double sigmoid = 0.0;  // revision term
  double ratio = 0.0;    // 1 - delta / (gold_size + pred_size)
};

struct DldResult {
  double dld = 0.0;
  double dlr_v = 0.0;
  double dlr_t = 0.0;
  std::vector<DldPair> pairs;  // one per gold dialog, in gold order
};

// Pairs each gold dialog with the predicted dialog of largest overlap (ties:
// smaller predicted dialog, then the one whose first utterance is earliest
// in the gold partition's utterance order). DLR_v and DLR_t are unweighted
// means over the pairs; DLD = lambda DLR_t + (1 - lambda) DLR_v. An empty
// evaluation scores 1.
DldResult DialogLevenshtein(const Partition& gold, const Partition& pred,
                            const DldParams& params = {});

// DLD of a partition against itself: lambda + (1 - lambda) / (1 + e^-eta).
double PerfectDld(const DldParams& params);

enum class Measure { kAri, kNmi, kShenF, kF1, kDld };

// Names used on the command line: ari, nmi, shenf, f1, dld.
const char* MeasureName(Measure m);
Measure ParseMeasure(const std::string& name);  // throws DomainError
std::set<Measure> ParseMeasureList(const std::string& comma_list);
const std::set<Measure>& AllMeasures();

struct MeasureReport {
  std::set<Measure> measures;
  double ari = 0.0;
  double nmi = 0.0;
  double shen_f = 0.0;
  double f1 = 0.0;
  DldParams params;
  DldResult dld;
};

MeasureReport Evaluate(const Partition& gold, const Partition& pred,
                       const DldParams& params = {},
                       const std::set<Measure>& measures = AllMeasures());

// Per-gold-dialog scores: each gold dialog is evaluated on the utterances of
// its DLD pairing neighbourhood (the dialog united with its paired predicted
// dialog), with both partitions restricted to that set.
struct DialogScores {
  std::string gold_dialog;
  std::string pred_dialog;
  std::size_t neighbourhood_size = 0;
  double ari = 0.0;
  double nmi = 0.0;
  double shen_f = 0.0;
  double f1 = 0.0;
  double dld = 0.0;

  double Get(Measure m) const;
};

std::vector<DialogScores> PerDialogScores(const Partition& gold,
                                          const Partition& pred,
                                          const DldParams& params = {});

}  // namespace untangle

#endif  // UNTANGLE_MEASURES_H_
