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

#include "untangle/linker.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "untangle/error.h"

namespace untangle {
namespace {

// Uniform double in [0, 1) from the top 53 bits; unlike
// std::uniform_real_distribution this is the same on every standard library.
double UnitDouble(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) by rejection.
std::uint64_t Below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void Shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[Below(rng, i)]);
  }
}

struct AdamState {
  std::vector<double> m, v;
  std::uint64_t step = 0;
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void AdamUpdate(std::span<double> params, std::span<const double> grad,
                AdamState& state, double lr) {
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = kBeta1 * state.m[i] + (1.0 - kBeta1) * grad[i];
    state.v[i] = kBeta2 * state.v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    double m_hat = state.m[i] / bc1;
    double v_hat = state.v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEps);
  }
}

void CheckDims(const LinkModel& model, std::size_t n) {
  if (n != model.feature_dim) {
    throw ShapeError("feature vector has " + std::to_string(n) +
                     " entries, model expects " +
                     std::to_string(model.feature_dim));
  }
}

}  // namespace

LinkModel LinkModel::Zeros(std::size_t feature_dim, std::size_t hidden) {
  LinkModel model;
  model.feature_dim = feature_dim;
  model.hidden = hidden;
  model.w1.assign(hidden * feature_dim, 0.0);
  model.b1.assign(hidden, 0.0);
  model.w2.assign(hidden, 0.0);
  return model;
}

LinkModel LinkModel::Initialize(std::size_t feature_dim, std::size_t hidden,
                                std::uint64_t seed) {
  LinkModel model = Zeros(feature_dim, hidden);
  model.metadata.seed = seed;
  std::mt19937_64 rng(seed);
  const double limit1 =
      std::sqrt(6.0 / static_cast<double>(feature_dim + hidden));
  for (double& w : model.w1) w = (2.0 * UnitDouble(rng) - 1.0) * limit1;
  const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  for (double& w : model.w2) w = (2.0 * UnitDouble(rng) - 1.0) * limit2;
  return model;
}

void LinkModel::Validate() const {
  if (feature_dim == 0 || hidden == 0) {
    throw ShapeError("model dimensions must be positive");
  }
  if (w1.size() != hidden * feature_dim || b1.size() != hidden ||
      w2.size() != hidden) {
    throw ShapeError("parameter arrays do not match the model dimensions");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(w1.begin(), w1.end(), finite) ||
      !std::all_of(b1.begin(), b1.end(), finite) ||
      !std::all_of(w2.begin(), w2.end(), finite) || !std::isfinite(b2)) {
    throw ShapeError("model has non-finite parameters");
  }
}

double ScoreLink(const LinkModel& model, std::span<const double> f) {
  CheckDims(model, f.size());
  double score = model.b2;
  for (std::size_t h = 0; h < model.hidden; ++h) {
    const double* row = model.w1.data() + h * model.feature_dim;
    double pre = model.b1[h];
    for (std::size_t d = 0; d < model.feature_dim; ++d) pre += row[d] * f[d];
    score += model.w2[h] * Softsign(pre);
  }
  return score;
}

std::vector<std::size_t> CandidatesFor(std::size_t child, std::size_t window) {
  std::vector<std::size_t> out;
  std::size_t reach = std::min(child, window);
  out.reserve(reach + 1);
  for (std::size_t k = 1; k <= reach; ++k) out.push_back(child - k);
  out.push_back(child);
  return out;
}

std::vector<CandidateSet> BuildTrainingPairs(const ChatLog& log,
                                             const Partition& gold,
                                             std::size_t window) {
  gold.CheckCovers(log);
  window = std::max<std::size_t>(window, 1);
  std::vector<CandidateSet> sets;
  sets.reserve(log.size());
  // Most recent log position seen so far per gold dialog.
  std::vector<std::size_t> last_seen(gold.size(), log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CandidateSet set;
    set.child = i;
    set.candidates = CandidatesFor(i, window);
    set.correct = set.candidates.size() - 1;
    std::size_t dialog = *gold.DialogOf(log[i].id);
    std::size_t prev = last_seen[dialog];
    if (prev != log.size() && i - prev <= window) set.correct = i - prev - 1;
    last_seen[dialog] = i;
    sets.push_back(std::move(set));
  }
  return sets;
}

FeaturizedSet Featurize(const CandidateSet& set,
                        const PairFeatureExtractor& extractor) {
  FeaturizedSet out;
  out.num_candidates = set.candidates.size();
  out.correct = set.correct;
  out.features.reserve(out.num_candidates * kFeatureDim);
  for (std::size_t parent : set.candidates) {
    LinkFeatureVector f = extractor.Extract(parent, set.child);
    out.features.insert(out.features.end(), f.values.begin(), f.values.end());
  }
  return out;
}

ModelGradient::ModelGradient(const LinkModel& model)
    : w1(model.w1.size(), 0.0),
      b1(model.b1.size(), 0.0),
      w2(model.w2.size(), 0.0) {}

void ModelGradient::Clear() {
  std::fill(w1.begin(), w1.end(), 0.0);
  std::fill(b1.begin(), b1.end(), 0.0);
  std::fill(w2.begin(), w2.end(), 0.0);
  b2 = 0.0;
}

double LossAndGradient(const LinkModel& model,
                       std::span<const FeaturizedSet> batch,
                       ModelGradient* gradient, double dropout,
                       std::mt19937_64* rng) {
  if (batch.empty()) return 0.0;
  const std::size_t dim = model.feature_dim;
  const std::size_t hidden = model.hidden;
  const bool drop = dropout > 0.0 && rng != nullptr;
  const double keep_scale = drop ? 1.0 / (1.0 - dropout) : 1.0;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  std::vector<double> pre;     // [candidates x hidden]
  std::vector<double> act;     // softsign(pre) * mask
  std::vector<double> mask;    // 0 or keep_scale
  std::vector<double> scores;
  double total = 0.0;
  for (const FeaturizedSet& set : batch) {
    const std::size_t n = set.num_candidates;
    CheckDims(model, n == 0 ? dim : set.features.size() / n);
    pre.assign(n * hidden, 0.0);
    act.assign(n * hidden, 0.0);
    mask.assign(n * hidden, 1.0);
    scores.assign(n, model.b2);
    for (std::size_t k = 0; k < n; ++k) {
      const double* f = set.features.data() + k * dim;
      for (std::size_t h = 0; h < hidden; ++h) {
        const double* row = model.w1.data() + h * dim;
        double z = model.b1[h];
        for (std::size_t d = 0; d < dim; ++d) z += row[d] * f[d];
        double m = 1.0;
        if (drop) m = UnitDouble(*rng) < dropout ? 0.0 : keep_scale;
        pre[k * hidden + h] = z;
        mask[k * hidden + h] = m;
        act[k * hidden + h] = Softsign(z) * m;
        scores[k] += model.w2[h] * act[k * hidden + h];
      }
    }
    double max_score = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - max_score);
    double log_z = max_score + std::log(sum);
    total += log_z - scores[set.correct];

    if (gradient == nullptr) continue;
    for (std::size_t k = 0; k < n; ++k) {
      double p = std::exp(scores[k] - log_z);
      double ds = (p - (k == set.correct ? 1.0 : 0.0)) * inv_batch;
      if (ds == 0.0) continue;
      gradient->b2 += ds;
      const double* f = set.features.data() + k * dim;
      for (std::size_t h = 0; h < hidden; ++h) {
        const std::size_t idx = k * hidden + h;
        gradient->w2[h] += ds * act[idx];
        if (mask[idx] == 0.0) continue;
        double a = std::abs(pre[idx]);
        double dz = ds * model.w2[h] * mask[idx] / ((1.0 + a) * (1.0 + a));
        gradient->b1[h] += dz;
        double* grow = gradient->w1.data() + h * dim;
        for (std::size_t d = 0; d < dim; ++d) grow[d] += dz * f[d];
      }
    }
  }
  return total * inv_batch;
}

LinkModel Train(const ChatLog& log, const Partition& gold,
                const TrainConfig& config) {
  if (log.size() < 2) {
    throw InsufficientDataError("training needs at least two utterances");
  }
  const std::size_t window = std::max<std::size_t>(config.window, 1);
  const std::size_t batch_size = std::max<std::size_t>(config.batch_size, 1);
  if (config.dropout < 0.0 || config.dropout >= 1.0) {
    throw DomainError("dropout must lie in [0, 1)");
  }
  if (config.hidden == 0) throw DomainError("hidden size must be positive");
  if (!(config.lr >= 0.0) || !std::isfinite(config.lr)) {
    throw DomainError("learning rate must be finite and non-negative");
  }

  std::vector<CandidateSet> sets = BuildTrainingPairs(log, gold, window);
  PairFeatureExtractor extractor(log, window);
  std::vector<FeaturizedSet> data;
  data.reserve(sets.size());
  for (const auto& set : sets) data.push_back(Featurize(set, extractor));

  const std::size_t heldout = std::max<std::size_t>(1, data.size() / 10);
  const std::size_t train_count = data.size() - heldout;
  std::span<const FeaturizedSet> train_sets(data.data(), train_count);
  std::span<const FeaturizedSet> heldout_sets(data.data() + train_count,
                                              heldout);

  LinkModel model = LinkModel::Initialize(kFeatureDim, config.hidden,
                                          config.seed);
  TrainingMetadata& meta = model.metadata;
  meta.seed = config.seed;
  meta.window = window;
  meta.epochs = config.epochs;
  meta.lr = config.lr;
  meta.dropout = config.dropout;
  meta.patience = config.patience;
  meta.batch_size = batch_size;
  meta.degenerate = std::all_of(sets.begin(), sets.end(), [](const auto& s) {
    return s.correct + 1 == s.candidates.size();
  });
  if (meta.degenerate) {
    std::cerr << "warning: every gold link is a self-link; the trained model "
                 "carries no linking signal\n";
  }

  // Separate stream from initialization so changing the init scheme does
  // not reshuffle batches.
  std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  ModelGradient grad(model);
  AdamState w1_state{std::vector<double>(model.w1.size()),
                     std::vector<double>(model.w1.size())};
  AdamState b1_state{std::vector<double>(model.b1.size()),
                     std::vector<double>(model.b1.size())};
  AdamState w2_state{std::vector<double>(model.w2.size()),
                     std::vector<double>(model.w2.size())};
  AdamState b2_state{std::vector<double>(1), std::vector<double>(1)};

  LinkModel best = model;
  double best_loss = LossAndGradient(model, heldout_sets, nullptr);
  std::size_t stale = 0;
  std::vector<std::size_t> order(train_count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<FeaturizedSet> batch;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Shuffle(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train_count; start += batch_size) {
      std::size_t end = std::min(train_count, start + batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(data[order[i]]);
      grad.Clear();
      double loss = LossAndGradient(model, batch, &grad, config.dropout, &rng);
      epoch_loss += loss * static_cast<double>(end - start);
      for (AdamState* s : {&w1_state, &b1_state, &w2_state, &b2_state}) {
        ++s->step;
      }
      AdamUpdate(model.w1, grad.w1, w1_state, config.lr);
      AdamUpdate(model.b1, grad.b1, b1_state, config.lr);
      AdamUpdate(model.w2, grad.w2, w2_state, config.lr);
      AdamUpdate(std::span<double>(&model.b2, 1),
                 std::span<const double>(&grad.b2, 1), b2_state, config.lr);
    }
    double heldout_loss = LossAndGradient(model, heldout_sets, nullptr);
    meta.train_loss.push_back(
        train_count > 0 ? epoch_loss / static_cast<double>(train_count) : 0.0);
    meta.heldout_loss.push_back(heldout_loss);
    meta.epochs_run = epoch;
    if (heldout_loss < best_loss) {
      best_loss = heldout_loss;
      best = model;
      meta.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.patience && config.patience > 0) {
      break;
    }
  }
  best.metadata = meta;
  best.Validate();
  return best;
}

void ReplyGraph::Validate() const {
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] > i) {
      throw OrderingError("utterance " + std::to_string(i) +
                          " links to later utterance " +
                          std::to_string(parent[i]));
    }
  }
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Keeps the smaller index as root, so a root is its component's earliest
  // member.
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

Partition Components(const ReplyGraph& graph, const ChatLog& log) {
  if (graph.parent.size() != log.size()) {
    throw ShapeError("reply graph covers " +
                     std::to_string(graph.parent.size()) +
                     " utterances, log has " + std::to_string(log.size()));
  }
  graph.Validate();
  UnionFind uf(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) uf.Union(i, graph.parent[i]);
  std::vector<std::pair<std::string, std::string>> assignments;
  assignments.reserve(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    assignments.emplace_back(log[i].id, log[uf.Find(i)].id);
  }
  return Partition::FromAssignments(assignments, log.project());
}

Disentanglement Decode(const LinkModel& model, const ChatLog& log,
                       std::size_t window) {
  CheckDims(model, kFeatureDim);
  model.Validate();
  window = std::max<std::size_t>(window, 1);
  PairFeatureExtractor extractor(log, window);
  ReplyGraph graph;
  graph.parent.resize(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    std::vector<std::size_t> candidates = CandidatesFor(i, window);
    std::size_t best = candidates.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c : candidates) {
      double s = ScoreLink(model, extractor.Extract(c, i).span());
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    graph.parent[i] = best;
  }
  Partition partition = Components(graph, log);
  return {std::move(graph), std::move(partition)};
}

double LinkAccuracy(const ReplyGraph& graph,
                    std::span<const CandidateSet> sets) {
  if (sets.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& set : sets) {
    if (set.child < graph.parent.size() &&
        graph.parent[set.child] == set.candidates[set.correct]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(sets.size());
}

}  // namespace untangle
