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


#include "commands.h"

#include <cstdint>
#include <exception>
#include <functional>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "untangle/corpus.h"
#include "untangle/error.h"
#include "untangle/linker.h"
#include "untangle/measures.h"
#include "untangle/patterns.h"
#include "untangle/report_io.h"
#include "untangle/stats.h"
#include "untangle/text.h"

namespace untangle::cli {
namespace {

constexpr const char* kToolVersion = "0.3.0";

struct Options {
  std::string corpus;
  std::string gold;
  std::string pred;
  std::string model;
  std::string out;
  std::string satisfaction;
  std::string intents;
  std::string bad_cases;
  std::string lemma_exceptions;
  std::string measures = "ari,nmi,shenf,f1,dld";
  bool drop_placeholder_heavy = false;
  bool per_dialog = false;
  std::size_t window = 50;
  std::size_t hidden = 256;
  std::size_t epochs = 20;
  std::size_t patience = 3;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  double dropout = 0.2;
  std::uint64_t seed = 0;
  double eta = 5.0;
  double lambda = 0.8;
};

const LemmaDictionary& Lemmas(const Options& o) {
  static std::map<std::string, LemmaDictionary> loaded;
  if (o.lemma_exceptions.empty()) return LemmaDictionary::Default();
  auto it = loaded.find(o.lemma_exceptions);
  if (it == loaded.end()) {
    it = loaded
             .emplace(o.lemma_exceptions,
                      LemmaDictionary::FromFile(o.lemma_exceptions))
             .first;
  }
  return it->second;
}

DldParams Params(const Options& o) {
  DldParams p{o.eta, o.lambda};
  p.Validate();
  return p;
}

Json Header(const char* command, Json config) {
  return Json{{"command", command},
              {"version", kToolVersion},
              {"config", std::move(config)}};
}

std::unordered_map<std::string, std::string> LabelMap(
    const std::vector<std::pair<std::string, std::string>>& assignments,
    const std::string& source) {
  std::unordered_map<std::string, std::string> labels;
  for (const auto& [id, dialog] : assignments) {
    if (!labels.emplace(id, dialog).second) {
      throw IntegrityError(source + ": utterance " + id +
                           " is assigned more than once");
    }
  }
  return labels;
}

// Gold partition of `log`: from --gold when given, else from the corpus
// labels.
Partition GoldFor(const ChatLog& log, const Options& o) {
  if (o.gold.empty()) return PartitionFromGold(log);
  return Partition::FromLabels(log, LabelMap(ReadAssignments(o.gold), o.gold));
}

// Gold and predicted partitions over the same utterance order. With
// --corpus both are resolved against the log; otherwise the gold file
// order is used.
std::pair<Partition, Partition> GoldAndPred(const Options& o) {
  auto pred_pairs = ReadAssignments(o.pred);
  if (!o.corpus.empty()) {
    ChatLog log = ReadChatLog(o.corpus);
    Partition gold = GoldFor(log, o);
    Partition pred = Partition::FromLabels(log, LabelMap(pred_pairs, o.pred));
    return {std::move(gold), std::move(pred)};
  }
  if (o.gold.empty()) {
    throw DataError("evaluation needs --gold or a labelled --corpus");
  }
  auto gold_pairs = ReadAssignments(o.gold);
  Partition gold = Partition::FromAssignments(gold_pairs, o.gold);
  Partition pred = Partition::FromAssignments(pred_pairs, o.pred);
  CheckSameCoverage(gold, pred);
  std::unordered_map<std::string, std::string> labels =
      LabelMap(pred_pairs, o.pred);
  std::vector<Dialog> dialogs;
  // Re-rank the prediction in gold order so tie-breaks depend on the gold
  // file alone.
  std::map<std::string, std::size_t> index;
  for (const auto& id : gold.order()) {
    const std::string& label = labels.at(id);
    auto [it, inserted] = index.emplace(label, dialogs.size());
    if (inserted) dialogs.push_back(Dialog{label, {}});
    dialogs[it->second].members.push_back(id);
  }
  return {std::move(gold), Partition(std::move(dialogs), gold.order(), o.pred)};
}

void WriteTextFile(const std::string& path,
                   const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  body(out);
  out.flush();
  if (!out) throw DataError("cannot write " + path);
}

Json EvalConfig(const Options& o) {
  return Json{{"corpus", o.corpus}, {"gold", o.gold},
              {"pred", o.pred},     {"out", o.out},
              {"eta", o.eta},       {"lambda", o.lambda},
              {"measures", o.measures}, {"per_dialog", o.per_dialog}};
}

int Preprocess(const Options& o, std::ostream& out) {
  ChatLog log = ReadChatLog(o.corpus);
  std::vector<std::string> normalized;
  PreprocessResult result = untangle::Preprocess(log, Lemmas(o), &normalized);
  // The output carries normalized text, so preprocessing it again is a
  // no-op.
  std::vector<Utterance> utterances(result.log.utterances().begin(),
                                    result.log.utterances().end());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    utterances[i].raw_text = normalized[i];
  }
  ChatLog written(std::move(utterances), log.project());
  if (o.drop_placeholder_heavy) {
    written = DropPlaceholderHeavyDialogs(written);
  }
  WriteTextFile(o.out, [&](std::ostream& s) { WriteChatLog(written, s); });
  for (std::size_t p = 0; p < kPlaceholderTokens.size(); ++p) {
    out << kPlaceholderTokens[p] << ' ' << result.counts[static_cast<Placeholder>(p)]
        << '\n';
  }
  out << "utterances " << written.size() << '\n';
  return kExitOk;
}

int TrainCommand(const Options& o, std::ostream& out) {
  ChatLog log = EnsureTokens(ReadChatLog(o.corpus), Lemmas(o));
  Partition gold = GoldFor(log, o);
  TrainConfig config;
  config.window = o.window;
  config.hidden = o.hidden;
  config.epochs = o.epochs;
  config.lr = o.lr;
  config.dropout = o.dropout;
  config.seed = o.seed;
  config.patience = o.patience;
  config.batch_size = o.batch_size;
  LinkModel model = Train(log, gold, config);
  Json j = ModelToJson(model);
  j["config"] = Json{{"corpus", o.corpus},
                     {"gold", o.gold},
                     {"lemma_exceptions", o.lemma_exceptions},
                     {"window", o.window},
                     {"hidden", o.hidden},
                     {"epochs", o.epochs},
                     {"lr", o.lr},
                     {"dropout", o.dropout},
                     {"seed", o.seed},
                     {"patience", o.patience},
                     {"batch_size", o.batch_size}};
  j["version"] = kToolVersion;
  WriteJsonFile(j, o.model);
  out << "epochs " << model.metadata.epochs_run << " best "
      << model.metadata.best_epoch << '\n';
  return kExitOk;
}

int DisentangleCommand(const Options& o, std::size_t window,
                       std::ostream& out) {
  LinkModel model = LoadModel(o.model);
  ChatLog log = EnsureTokens(ReadChatLog(o.corpus), Lemmas(o));
  if (window == 0) window = model.metadata.window;
  Disentanglement d = Decode(model, log, window);
  WriteTextFile(o.out,
                [&](std::ostream& s) { WriteAssignments(d.partition, s); });
  out << "dialogs " << d.partition.size() << '\n';
  return kExitOk;
}

int EvaluateCommand(const Options& o, std::ostream& out) {
  std::set<Measure> measures = ParseMeasureList(o.measures);
  DldParams params = Params(o);
  auto [gold, pred] = GoldAndPred(o);
  MeasureReport report = Evaluate(gold, pred, params, measures);
  Json j = Header("evaluate", EvalConfig(o));
  j["measures"] = MeasureReportToJson(report);
  j["utterances"] = gold.utterance_count();
  j["gold_dialogs"] = gold.size();
  j["pred_dialogs"] = pred.size();
  if (o.per_dialog) {
    j["per_dialog"] = DialogScoresToJson(PerDialogScores(gold, pred, params));
  }
  WriteJsonFile(j, o.out);
  for (Measure m : measures) {
    double v = m == Measure::kAri     ? report.ari
               : m == Measure::kNmi   ? report.nmi
               : m == Measure::kShenF ? report.shen_f
               : m == Measure::kF1    ? report.f1
                                      : report.dld.dld;
    out << MeasureName(m) << ' ' << v << '\n';
  }
  return kExitOk;
}

int CorrelateCommand(const Options& o, std::ostream& out) {
  std::set<Measure> measures = ParseMeasureList(o.measures);
  DldParams params = Params(o);
  auto [gold, pred] = GoldAndPred(o);
  std::vector<SatisfactionRecord> records =
      ReadSatisfactionCsv(o.satisfaction);
  std::map<std::string, double> satisfaction = MeanSatisfaction(records);
  std::optional<double> kappa = AverageRaterKappa(records);
  std::vector<DialogScores> scores = PerDialogScores(gold, pred, params);

  Json config = EvalConfig(o);
  config["satisfaction"] = o.satisfaction;
  Json j = Header("correlate", config);
  Json reports = Json::object();
  for (Measure m : measures) {
    std::map<std::string, double> values;
    for (const DialogScores& s : scores) values[s.gold_dialog] = s.Get(m);
    StatsReport r = DeviationReport(values, satisfaction);
    r.kappa = kappa;
    reports[MeasureName(m)] = StatsReportToJson(r);
    out << MeasureName(m) << " rmse " << r.rmse << " mae " << r.mae << '\n';
  }
  j["reports"] = reports;
  j["kappa"] = kappa ? Json(*kappa) : Json(nullptr);
  j["satisfaction"] = satisfaction;
  j["per_dialog"] = DialogScoresToJson(scores);
  WriteJsonFile(j, o.out);
  return kExitOk;
}

int PatternsCommand(const Options& o, std::ostream& out) {
  ChatLog log = ReadChatLog(o.corpus);
  Partition partition = GoldFor(log, o);
  std::vector<StepOverride> overrides;
  if (!o.intents.empty()) overrides = ReadStepOverrides(o.intents);
  std::vector<DialogPattern> dialogs =
      AnalyzePatterns(log, partition, overrides);
  std::optional<BadCaseReport> bad;
  if (!o.bad_cases.empty()) {
    bad = SummarizeBadCases(ReadBadCaseLabels(o.bad_cases));
  }
  Json j = Header("patterns", Json{{"corpus", o.corpus},
                                   {"gold", o.gold},
                                   {"intents", o.intents},
                                   {"bad_cases", o.bad_cases},
                                   {"out", o.out}});
  j["patterns"] = PatternReportToJson(dialogs, bad);
  WriteJsonFile(j, o.out);
  out << "dialogs " << dialogs.size() << '\n';
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Chat disentanglement and evaluation toolkit", "untangle"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "TOML or INI file of option defaults");
  app.require_subcommand(1);
  Options o;
  std::size_t decode_window = 0;

  auto positive = CLI::PositiveNumber;
  auto* pre = app.add_subcommand("preprocess", "Normalize and tokenize a corpus");
  pre->add_option("--corpus", o.corpus, "Raw corpus (jsonl)")->required();
  pre->add_option("--out", o.out, "Normalized corpus (jsonl)")->required();
  pre->add_option("--lemma-exceptions", o.lemma_exceptions,
                  "Lemma exception dictionary");
  pre->add_flag("--drop-placeholder-heavy", o.drop_placeholder_heavy,
                "Drop gold dialogs whose tokens are mostly placeholders");

  auto* train = app.add_subcommand("train", "Train the reply-link model");
  train->add_option("--corpus", o.corpus, "Corpus (jsonl)")->required();
  train->add_option("--gold", o.gold, "Gold assignments (jsonl)");
  train->add_option("--model", o.model, "Model output (json)")->required();
  train->add_option("--seed", o.seed, "Random seed")->required();
  train->add_option("--window", o.window, "Candidate window")->check(positive);
  train->add_option("--hidden", o.hidden, "Hidden units")->check(positive);
  train->add_option("--epochs", o.epochs, "Maximum epochs")->check(positive);
  train->add_option("--lr", o.lr, "Adam learning rate")->check(positive);
  train->add_option("--dropout", o.dropout, "Dropout rate")
      ->check(CLI::Range(0.0, 0.999));
  train->add_option("--patience", o.patience, "Early-stopping patience")
      ->check(positive);
  train->add_option("--batch-size", o.batch_size, "Candidate sets per step")
      ->check(positive);
  train->add_option("--lemma-exceptions", o.lemma_exceptions,
                    "Lemma exception dictionary");

  auto* dis = app.add_subcommand("disentangle", "Predict dialogs");
  dis->add_option("--corpus", o.corpus, "Corpus (jsonl)")->required();
  dis->add_option("--model", o.model, "Trained model (json)")->required();
  dis->add_option("--out", o.out, "Predicted assignments (jsonl)")->required();
  dis->add_option("--window", decode_window,
                  "Candidate window (default: the training window)")
      ->check(positive);
  dis->add_option("--lemma-exceptions", o.lemma_exceptions,
                  "Lemma exception dictionary");

  auto add_eval = [&](CLI::App* sub) {
    sub->add_option("--gold", o.gold, "Gold assignments (jsonl)");
    sub->add_option("--corpus", o.corpus, "Corpus fixing utterance order");
    sub->add_option("--pred", o.pred, "Predicted assignments (jsonl)")
        ->required();
    sub->add_option("--out", o.out, "Report (json)")->required();
    sub->add_option("--eta", o.eta, "DLD revision midpoint");
    sub->add_option("--lambda", o.lambda, "DLD ratio weight");
    sub->add_option("--measures", o.measures, "Comma list of measures");
  };
  auto* eval = app.add_subcommand("evaluate", "Score a prediction");
  add_eval(eval);
  eval->add_flag("--per-dialog", o.per_dialog, "Add per-dialog scores");

  auto* corr = app.add_subcommand("correlate",
                                  "Compare measures with satisfaction scores");
  add_eval(corr);
  corr->add_option("--satisfaction", o.satisfaction,
                   "CSV dialog_id,rater_id,score")
      ->required();

  auto* pat = app.add_subcommand("patterns", "Interaction patterns and bad cases");
  pat->add_option("--corpus", o.corpus, "Corpus (jsonl)")->required();
  pat->add_option("--gold", o.gold, "Dialog assignments (jsonl)");
  pat->add_option("--intents", o.intents, "CSV utterance_id,intent,role");
  pat->add_option("--bad-cases", o.bad_cases, "CSV dialog_id,project,category");
  pat->add_option("--out", o.out, "Report (json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pre->parsed()) return Preprocess(o, out);
    if (train->parsed()) return TrainCommand(o, out);
    if (dis->parsed()) return DisentangleCommand(o, decode_window, out);
    if (eval->parsed()) return EvaluateCommand(o, out);
    if (corr->parsed()) return CorrelateCommand(o, out);
    if (pat->parsed()) return PatternsCommand(o, out);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace untangle::cli
