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


// Acceptance harness: one PASS/FAIL line per criterion, with its runtime.
// Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "testing/oracles.h"
#include "testing/synthetic.h"
#include "untangle/corpus.h"
#include "untangle/linker.h"
#include "untangle/measures.h"
#include "untangle/patterns.h"
#include "untangle/report_io.h"
#include "untangle/stats.h"
#include "untangle/text.h"

namespace untangle {
namespace {

using testing::FromLabelVector;
using testing::Labels;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failed check; later checks only add to the count.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ == 0) first_ = what;
  }
  void Near(double got, double want, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: got %.17g want %.17g", what.c_str(),
                  got, want);
    Expect(std::abs(got - want) <= tol, buf);
  }
  Outcome Result(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failed, first: " + first_};
  }

 private:
  int failures_ = 0;
  std::string first_;
};

Outcome CheckPerfectDld() {
  Checker c;
  const double want = 0.8 + 0.2 / (1.0 + std::exp(-5.0));
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    Partition p = FromLabelVector(testing::RandomLabels(1 + rng() % 40, rng));
    c.Near(DialogLevenshtein(p, p).dld, want, 1e-12, "DLD(gold, gold)");
  }
  return c.Result("100 golds at 0.8 + 0.2/(1+e^-5)");
}

Outcome CheckDldMaximality() {
  Checker c;
  std::mt19937_64 rng(102);
  std::vector<std::vector<Labels>> all(7);
  std::vector<Partition> parts;
  std::size_t compared = 0;
  for (std::size_t n = 1; n <= 6; ++n) all[n] = testing::AllSetPartitions(n);
  for (int g = 0; g < 50; ++g) {
    std::size_t n = 1 + g % 6;
    const Labels& gold = all[n][rng() % all[n].size()];
    Partition gp = FromLabelVector(gold);
    const double at_gold = DialogLevenshtein(gp, gp).dld;
    for (const Labels& pred : all[n]) {
      if (pred == gold) continue;
      ++compared;
      c.Expect(DialogLevenshtein(gp, FromLabelVector(pred)).dld < at_gold,
               "non-gold prediction reached the gold DLD for n=" +
                   std::to_string(n));
    }
  }
  return c.Result("50 golds, " + std::to_string(compared) +
                  " alternative predictions, all strictly lower");
}

Outcome CheckOracleEquivalence() {
  Checker c;
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 1 + rng() % 12;
    Labels gl = testing::RandomLabels(n, rng);
    Labels pl = testing::RandomLabels(n, rng);
    Partition g = FromLabelVector(gl), p = FromLabelVector(pl);
    c.Near(AdjustedRandIndex(g, p), testing::NaiveAri(gl, pl), 1e-10, "ARI");
    c.Near(NormalizedMutualInformation(g, p), testing::NaiveNmi(gl, pl), 1e-10,
           "NMI");
    c.Near(ShenF(g, p), testing::BruteShenF(gl, pl), 1e-10, "Shen-F");
  }
  return c.Result("500 random pairs, ARI/NMI/Shen-F within 1e-10");
}

Outcome CheckWorkedFixture() {
  Checker c;
  Partition g({Dialog{"g1", {"u1", "u2"}}, Dialog{"g2", {"u3"}}});
  Partition p({Dialog{"p1", {"u1", "u2", "u3"}}});
  MeasureReport r = Evaluate(g, p);
  c.Near(r.ari, 0.0, 1e-15, "ARI");
  c.Near(r.nmi, 0.0, 1e-15, "NMI");
  c.Near(r.f1, 0.0, 0.0, "F1");
  c.Near(r.shen_f, 0.7, 1e-15, "Shen-F");
  c.Near(r.dld.dld, 0.71346, 1e-5, "DLD");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "ARI 0, NMI 0, F1 0, Shen-F %.4f, DLD %.5f",
                r.shen_f, r.dld.dld);
  return c.Result(buf);
}

Outcome CheckGradientCheck() {
  Checker c;
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const double dropout = seed > 2 ? 0.3 : 0.0;
    const std::size_t dim = 6, hidden = 8;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    LinkModel model = LinkModel::Initialize(dim, hidden, seed);
    for (double& b : model.b1) b = 0.5 * normal(rng);
    std::vector<FeaturizedSet> sets(5);
    for (FeaturizedSet& s : sets) {
      s.num_candidates = 2 + rng() % 5;
      s.correct = rng() % s.num_candidates;
      for (std::size_t i = 0; i < s.num_candidates * dim; ++i) {
        s.features.push_back(normal(rng));
      }
    }
    const std::mt19937_64 mask(seed + 100);
    auto loss = [&](const LinkModel& m, ModelGradient* grad) {
      std::mt19937_64 copy = mask;
      return LossAndGradient(m, sets, grad, dropout,
                             dropout > 0 ? &copy : nullptr);
    };
    ModelGradient grad(model);
    loss(model, &grad);
    const double h = 1e-5;
    auto numeric = [&](double* param) {
      const double saved = *param;
      *param = saved + h;
      const double up = loss(model, nullptr);
      *param = saved - h;
      const double down = loss(model, nullptr);
      *param = saved;
      return (up - down) / (2 * h);
    };
    auto compare = [&](std::vector<double>& params,
                       const std::vector<double>& analytic) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double n = numeric(&params[i]);
        const double rel = std::abs(analytic[i] - n) /
                           std::max({std::abs(analytic[i]), std::abs(n), 1e-8});
        worst = std::max(worst, rel);
        c.Expect(rel <= 1e-4, "relative error above 1e-4");
      }
    };
    compare(model.w1, grad.w1);
    compare(model.b1, grad.b1);
    compare(model.w2, grad.w2);
    // The output bias shifts every candidate score alike, so the loss is
    // flat along it and both derivatives are zero up to rounding.
    c.Expect(std::abs(grad.b2) <= 1e-12, "analytic output-bias gradient");
    c.Expect(std::abs(numeric(&model.b2)) <= 1e-9, "numeric output-bias gradient");
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max relative error %.2e", worst);
  return c.Result(buf);
}

Outcome CheckEndToEnd() {
  Checker c;
  ChatLog train_log = testing::SyntheticLog(2000, 201);
  ChatLog test_log = testing::SyntheticLog(2000, 202);
  TrainConfig config;
  config.epochs = 20;
  config.seed = 7;
  LinkModel model = Train(train_log, PartitionFromGold(train_log), config);
  Partition gold = PartitionFromGold(test_log);
  Disentanglement d = Decode(model, test_log, config.window);
  const double accuracy =
      LinkAccuracy(d.graph, BuildTrainingPairs(test_log, gold, config.window));
  const double shen_f = ShenF(gold, d.partition);
  c.Expect(model.metadata.epochs_run <= 20, "more than 20 epochs");
  c.Expect(accuracy >= 0.95, "link accuracy " + std::to_string(accuracy));
  c.Expect(shen_f >= 0.90, "Shen-F " + std::to_string(shen_f));
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "held-out link accuracy %.4f, Shen-F %.4f, %zu epochs", accuracy,
                shen_f, model.metadata.epochs_run);
  return c.Result(buf);
}

Outcome CheckStatsOracle() {
  Checker c;
  // Reference p-values from 50-digit mpmath evaluations of the same
  // statistics.
  const std::vector<double> x = {0.62, 0.71, 0.55, 0.80, 0.67, 0.74, 0.59, 0.69};
  const std::vector<double> y = {0.50, 0.75, 0.25, 1.00, 0.75, 0.50, 0.25, 0.75};
  c.Near(IndependentTTest(x, y).p, 0.44284411279329691317, 1e-6, "ist p");
  c.Near(PairedTTest(x, y).p, 0.3102591034733104961, 1e-6, "pst p");
  std::vector<std::vector<double>> groups = {
      {0.2, 0.4, 0.3, 0.5}, {0.6, 0.7, 0.5, 0.9, 0.8}, {0.1, 0.3, 0.2}};
  c.Near(OneWayAnova(groups).p, 0.0016167867190023659982, 1e-6, "anova p");
  std::vector<std::vector<double>> two = {x, y};
  c.Near(OneWayAnova(two).p, IndependentTTest(x, y).p, 1e-9, "anova vs ist");
  std::vector<int> a = {1, 2, 3, 2, 1, 3, 3};
  c.Near(CohensKappa(a, a), 1.0, 0.0, "kappa(a, a)");
  std::vector<int> u = {1, 1, 2, 2}, v = {2, 2, 1, 1};
  c.Near(CohensKappa(u, v), -1.0, 0.0, "kappa anti-correlated");
  return c.Result("ist, pst, anova within 1e-6; kappa 1 and -1");
}

Outcome CheckSatisfactionNormalization() {
  Checker c;
  c.Near(NormalizeSatisfaction(1), 0.0, 0.0, "score 1");
  c.Near(NormalizeSatisfaction(3), 0.5, 0.0, "score 3");
  c.Near(NormalizeSatisfaction(5), 1.0, 0.0, "score 5");
  return c.Result("1, 3, 5 -> 0, 0.5, 1");
}

Outcome CheckBadCases() {
  Checker c;
  std::vector<BadCaseLabel> labels;
  const std::pair<BadCaseCategory, int> counts[] = {
      {BadCaseCategory::kIIP, 64},
      {BadCaseCategory::kICI, 21},
      {BadCaseCategory::kMT, 9},
      {BadCaseCategory::kIUR, 6}};
  for (const auto& [category, n] : counts) {
    for (int i = 0; i < n; ++i) {
      labels.push_back({"d" + std::to_string(labels.size()), "fixture", category});
    }
  }
  BadCaseReport r = SummarizeBadCases(labels);
  const double want[] = {64.0, 21.0, 9.0, 6.0};
  for (std::size_t k = 0; k < kBadCaseCategoryCount; ++k) {
    c.Near(r.overall.percent[k], want[k], 0.0,
           BadCaseName(static_cast<BadCaseCategory>(k)));
  }
  return c.Result("IIP 64%, ICI 21%, MT 9%, IUR 6%");
}

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Mirrors the preprocess command: the written text is the normalized text.
std::string PreprocessToText(const ChatLog& log) {
  std::vector<std::string> normalized;
  PreprocessResult result = Preprocess(log, LemmaDictionary::Default(), &normalized);
  std::vector<Utterance> us(result.log.utterances().begin(),
                            result.log.utterances().end());
  for (std::size_t i = 0; i < us.size(); ++i) us[i].raw_text = normalized[i];
  std::ostringstream out;
  WriteChatLog(ChatLog(std::move(us), log.project()), out);
  return out.str();
}

Outcome CheckDeterminism() {
  Checker c;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "untangle_acceptance";
  fs::create_directories(dir);
  ChatLog log = testing::SyntheticLog(400, 301);
  TrainConfig config;
  config.hidden = 32;
  config.epochs = 5;
  config.seed = 11;
  for (int run = 0; run < 2; ++run) {
    SaveModel(Train(log, PartitionFromGold(log), config),
              (dir / ("model" + std::to_string(run) + ".json")).string());
  }
  const std::string first = Slurp(dir / "model0.json");
  c.Expect(!first.empty(), "model file is empty");
  c.Expect(first == Slurp(dir / "model1.json"), "model files differ");

  ChatLog raw = ReadChatLog(std::string(UNTANGLE_TEST_DATA_DIR) + "/chat.jsonl");
  const std::string once = PreprocessToText(raw);
  std::istringstream in(once);
  const std::string twice = PreprocessToText(ParseChatLog(in, "once"));
  c.Expect(once == twice, "preprocess is not idempotent");
  fs::remove_all(dir);
  return c.Result("identical model files (" + std::to_string(first.size()) +
                  " bytes); preprocess idempotent on " +
                  std::to_string(raw.size()) + " utterances");
}

struct Criterion {
  int number;
  const char* name;
  double limit_seconds;  // 0 means unbounded
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace untangle

int main() {
  using namespace untangle;
  const std::vector<Criterion> criteria = {
      {1, "dld-perfect-closed-form", 1.0, CheckPerfectDld},
      {2, "dld-maximality", 10.0, CheckDldMaximality},
      {3, "measure-oracles", 5.0, CheckOracleEquivalence},
      {4, "worked-fixture", 0.0, CheckWorkedFixture},
      {5, "gradient-check", 2.0, CheckGradientCheck},
      {6, "end-to-end-synthetic", 120.0, CheckEndToEnd},
      {7, "stats-oracle", 0.0, CheckStatsOracle},
      {8, "satisfaction-normalization", 0.0, CheckSatisfactionNormalization},
      {9, "bad-case-report", 0.0, CheckBadCases},
      {10, "determinism", 0.0, CheckDeterminism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
      outcome.pass = false;
      outcome.detail += "; over the " + std::to_string(c.limit_seconds) + " s limit";
    }
    if (!outcome.pass) ++failed;
    std::printf("%s %2d %-28s %8.3fs  %s\n", outcome.pass ? "PASS" : "FAIL",
                c.number, c.name, seconds, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
