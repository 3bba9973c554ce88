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

// Reply-link model: a two-layer feedforward scorer with softsign hidden units
// ranks each utterance's candidate parents (the preceding `window` utterances
// and itself). Decoding links every utterance to its best candidate; the
// connected components of the resulting graph are the conversations.

#ifndef UNTANGLE_LINKER_H_
#define UNTANGLE_LINKER_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "untangle/corpus.h"
#include "untangle/features.h"

namespace untangle {

inline double Softsign(double x) { return x / (1.0 + (x < 0 ? -x : x)); }

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::size_t window = 50;
  std::size_t epochs = 20;  // requested
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 0 means the initialization was best
  double lr = 1e-3;
  double dropout = 0.2;
  std::size_t patience = 3;
  std::size_t batch_size = 32;
  bool degenerate = false;  // every gold link was a self-link
  std::vector<double> train_loss;    // per epoch, with dropout
  std::vector<double> heldout_loss;  // per epoch, without dropout

  friend bool operator==(const TrainingMetadata&,
                         const TrainingMetadata&) = default;
};

// score(f) = w2 . softsign(W1 f + b1) + b2. W1 is hidden x feature_dim,
// row-major.
struct LinkModel {
  std::string schema{kFeatureSchemaName};
  std::size_t feature_dim = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
  TrainingMetadata metadata;

  // All-zero parameters.
  static LinkModel Zeros(std::size_t feature_dim, std::size_t hidden);

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static LinkModel Initialize(std::size_t feature_dim, std::size_t hidden,
                              std::uint64_t seed);

  // Throws ShapeError if array lengths disagree with the dimensions or a
  // parameter is not finite.
  void Validate() const;

  std::size_t parameter_count() const {
    return w1.size() + b1.size() + w2.size() + 1;
  }

  friend bool operator==(const LinkModel&, const LinkModel&) = default;
};

// Raw logit. Throws ShapeError when f.size() != model.feature_dim.
double ScoreLink(const LinkModel& model, std::span<const double> f);

// One ranking problem: candidates[k] are log positions, most recent first,
// with the child itself last. `correct` indexes candidates.
struct CandidateSet {
  std::size_t child = 0;
  std::vector<std::size_t> candidates;
  std::size_t correct = 0;
};

// Candidates for `child`: the `window` preceding utterances (most recent
// first), then the child itself.
std::vector<std::size_t> CandidatesFor(std::size_t child, std::size_t window);

// Gold target per utterance: the nearest preceding member of its gold dialog
// when that lies inside the window, otherwise the utterance itself.
std::vector<CandidateSet> BuildTrainingPairs(const ChatLog& log,
                                             const Partition& gold,
                                             std::size_t window);

// Candidate features, row-major [candidates x feature_dim].
struct FeaturizedSet {
  std::vector<double> features;
  std::size_t num_candidates = 0;
  std::size_t correct = 0;
};

FeaturizedSet Featurize(const CandidateSet& set,
                        const PairFeatureExtractor& extractor);

// Parameter-shaped gradient buffer.
struct ModelGradient {
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;

  explicit ModelGradient(const LinkModel& model);
  void Clear();
};

// Mean softmax cross-entropy over `batch`; each set contributes
// logsumexp(scores) - scores[correct]. When `gradient` is non-null it
// receives d(loss)/d(parameters). With `dropout` > 0 hidden activations are
// zeroed with that probability (inverted scaling) using draws from `rng`.
double LossAndGradient(const LinkModel& model,
                       std::span<const FeaturizedSet> batch,
                       ModelGradient* gradient, double dropout = 0.0,
                       std::mt19937_64* rng = nullptr);

struct TrainConfig {
  std::size_t window = 50;
  std::size_t hidden = 256;
  std::size_t epochs = 20;
  double lr = 1e-3;
  double dropout = 0.2;
  std::uint64_t seed = 0;
  std::size_t patience = 3;
  std::size_t batch_size = 32;
};

// Mini-batch Adam on the candidate-set cross-entropy. The last 10% of
// utterances (at least one) are held out; training stops once the held-out
// loss has not improved for `patience` epochs and the best checkpoint is
// returned. Deterministic for a given seed. Throws InsufficientDataError for
// logs with fewer than two utterances.
LinkModel Train(const ChatLog& log, const Partition& gold,
                const TrainConfig& config);

// parent[i] is the log position utterance i replies to; parent[i] == i
// starts a new conversation.
struct ReplyGraph {
  std::vector<std::size_t> parent;

  // Throws OrderingError when some parent follows its child.
  void Validate() const;
};

// Connected components of the undirected link graph. Dialogs are ordered by
// their earliest member, whose id becomes the dialog id.
Partition Components(const ReplyGraph& graph, const ChatLog& log);

struct Disentanglement {
  ReplyGraph graph;
  Partition partition;
};

// Links each utterance to its highest-scoring candidate. Ties go to the most
// recent candidate; the self-link wins only when strictly best.
Disentanglement Decode(const LinkModel& model, const ChatLog& log,
                       std::size_t window);

// Fraction of `sets` whose predicted parent matches the gold candidate.
double LinkAccuracy(const ReplyGraph& graph, std::span<const CandidateSet> sets);

}  // namespace untangle

#endif  // UNTANGLE_LINKER_H_
