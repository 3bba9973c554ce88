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


#include "untangle/report_io.h"

#include <fstream>
#include <sstream>

#include "untangle/error.h"

namespace untangle {
namespace {

template <typename T>
T Field(const Json& j, const char* key, const std::string& source) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(source, 0, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(source, 0, std::string("field '") + key + "' has the wrong type");
  }
}

Json MaybeNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json DistributionToJson(const CategoryDistribution& d) {
  Json counts = Json::object();
  Json percent = Json::object();
  for (std::size_t i = 0; i < kBadCaseCategoryCount; ++i) {
    const char* name = BadCaseName(static_cast<BadCaseCategory>(i));
    counts[name] = d.counts[i];
    percent[name] = d.percent[i];
  }
  return Json{{"total", d.total}, {"counts", counts}, {"percent", percent}};
}

}  // namespace

Json ModelToJson(const LinkModel& model) {
  const TrainingMetadata& m = model.metadata;
  Json names = Json::array();
  for (std::string_view n : FeatureNames()) names.push_back(std::string(n));
  Json meta = {
      {"seed", m.seed},
      {"window", m.window},
      {"epochs", m.epochs},
      {"epochs_run", m.epochs_run},
      {"best_epoch", m.best_epoch},
      {"lr", m.lr},
      {"dropout", m.dropout},
      {"patience", m.patience},
      {"batch_size", m.batch_size},
      {"degenerate", m.degenerate},
      {"train_loss", m.train_loss},
      {"heldout_loss", m.heldout_loss},
  };
  return Json{{"schema", model.schema},
              {"feature_names", names},
              {"feature_dim", model.feature_dim},
              {"hidden", model.hidden},
              {"w1", model.w1},
              {"b1", model.b1},
              {"w2", model.w2},
              {"b2", model.b2},
              {"metadata", meta}};
}

LinkModel ModelFromJson(const Json& j, const std::string& source) {
  if (!j.is_object()) throw ParseError(source, 0, "model is not a JSON object");
  LinkModel model;
  model.schema = Field<std::string>(j, "schema", source);
  if (model.schema != kFeatureSchemaName) {
    throw ShapeError(source + ": feature schema '" + model.schema +
                     "' is not '" + std::string(kFeatureSchemaName) + "'");
  }
  model.feature_dim = Field<std::size_t>(j, "feature_dim", source);
  model.hidden = Field<std::size_t>(j, "hidden", source);
  model.w1 = Field<std::vector<double>>(j, "w1", source);
  model.b1 = Field<std::vector<double>>(j, "b1", source);
  model.w2 = Field<std::vector<double>>(j, "w2", source);
  model.b2 = Field<double>(j, "b2", source);
  if (model.feature_dim != kFeatureDim) {
    throw ShapeError(source + ": feature_dim " +
                     std::to_string(model.feature_dim) + ", expected " +
                     std::to_string(kFeatureDim));
  }
  if (j.contains("metadata")) {
    const Json& mj = j["metadata"];
    TrainingMetadata& m = model.metadata;
    m.seed = Field<std::uint64_t>(mj, "seed", source);
    m.window = Field<std::size_t>(mj, "window", source);
    m.epochs = Field<std::size_t>(mj, "epochs", source);
    m.epochs_run = Field<std::size_t>(mj, "epochs_run", source);
    m.best_epoch = Field<std::size_t>(mj, "best_epoch", source);
    m.lr = Field<double>(mj, "lr", source);
    m.dropout = Field<double>(mj, "dropout", source);
    m.patience = Field<std::size_t>(mj, "patience", source);
    m.batch_size = Field<std::size_t>(mj, "batch_size", source);
    m.degenerate = Field<bool>(mj, "degenerate", source);
    m.train_loss = Field<std::vector<double>>(mj, "train_loss", source);
    m.heldout_loss = Field<std::vector<double>>(mj, "heldout_loss", source);
  }
  try {
    model.Validate();
  } catch (const ShapeError& e) {
    throw ShapeError(source + ": " + e.what());
  }
  return model;
}

void SaveModel(const LinkModel& model, const std::string& path) {
  WriteJsonFile(ModelToJson(model), path);
}

LinkModel LoadModel(const std::string& path) {
  return ModelFromJson(ReadJsonFile(path), path);
}

Json MeasureReportToJson(const MeasureReport& report, bool dld_pairs) {
  Json j = Json::object();
  for (Measure m : report.measures) {
    switch (m) {
      case Measure::kAri:
        j["ari"] = report.ari;
        break;
      case Measure::kNmi:
        j["nmi"] = report.nmi;
        break;
      case Measure::kShenF:
        j["shen_f"] = report.shen_f;
        break;
      case Measure::kF1:
        j["f1"] = report.f1;
        j["f1_includes_singletons"] = true;
        break;
      case Measure::kDld: {
        j["dld"] = report.dld.dld;
        j["dlr_v"] = report.dld.dlr_v;
        j["dlr_t"] = report.dld.dlr_t;
        j["eta"] = report.params.eta;
        j["lambda"] = report.params.lambda;
        if (dld_pairs) {
          Json pairs = Json::array();
          for (const DldPair& p : report.dld.pairs) {
            pairs.push_back({{"gold_dialog", p.gold_dialog},
                             {"pred_dialog", p.pred_dialog},
                             {"gold_size", p.gold_size},
                             {"pred_size", p.pred_size},
                             {"overlap", p.overlap},
                             {"delta", p.delta},
                             {"sigmoid", p.sigmoid},
                             {"ratio", p.ratio}});
          }
          j["pairing"] = pairs;
        }
        break;
      }
    }
  }
  return j;
}

Json DialogScoresToJson(std::span<const DialogScores> scores) {
  Json out = Json::array();
  for (const DialogScores& s : scores) {
    out.push_back({{"gold_dialog", s.gold_dialog},
                   {"pred_dialog", s.pred_dialog},
                   {"neighbourhood_size", s.neighbourhood_size},
                   {"ari", s.ari},
                   {"nmi", s.nmi},
                   {"shen_f", s.shen_f},
                   {"f1", s.f1},
                   {"dld", s.dld}});
  }
  return out;
}

Json TestResultToJson(const TestResult& result, bool anova) {
  Json j = {{"statistic", result.statistic}, {"p", result.p}};
  if (anova) {
    j["df_between"] = result.df1;
    j["df_within"] = result.df2;
  } else {
    j["df"] = result.df1;
  }
  return j;
}

Json StatsReportToJson(const StatsReport& report) {
  return Json{{"n", report.n},
              {"rmse", report.rmse},
              {"mae", report.mae},
              {"pearson", MaybeNumber(report.pearson)},
              {"ist", TestResultToJson(report.ist, false)},
              {"pst", TestResultToJson(report.pst, false)},
              {"anova", TestResultToJson(report.anova, true)},
              {"kappa", MaybeNumber(report.kappa)}};
}

Json BadCaseReportToJson(const BadCaseReport& report) {
  Json by_project = Json::object();
  for (const auto& [project, d] : report.by_project) {
    by_project[project] = DistributionToJson(d);
  }
  return Json{{"overall", DistributionToJson(report.overall)},
              {"by_project", by_project}};
}

Json PatternReportToJson(std::span<const DialogPattern> dialogs,
                         const std::optional<BadCaseReport>& bad_cases) {
  Json per_dialog = Json::array();
  Json counts = {{"DirectAnswer", 0},
                 {"ClarifyingAnswer", 0},
                 {"ClarifyingQuestion", 0},
                 {"none", 0}};
  for (const DialogPattern& d : dialogs) {
    Json steps = Json::array();
    for (const Step& s : d.steps) {
      steps.push_back({IntentName(s.intent), RoleName(s.role)});
    }
    Json entry = {{"dialog", d.dialog_id}, {"steps", steps}};
    if (d.match) {
      const char* name = PatternNameString(d.match->pattern);
      entry["pattern"] = name;
      entry["matched_length"] = d.match->length;
      counts[name] = counts[name].get<std::size_t>() + 1;
    } else {
      entry["pattern"] = nullptr;
      entry["matched_length"] = 0;
      counts["none"] = counts["none"].get<std::size_t>() + 1;
    }
    per_dialog.push_back(std::move(entry));
  }
  Json j = {{"dialogs", per_dialog}, {"pattern_counts", counts}};
  j["bad_cases"] = bad_cases ? BadCaseReportToJson(*bad_cases) : Json(nullptr);
  return j;
}

std::string DumpJson(const Json& j) {
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

void WriteJsonFile(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << DumpJson(j);
  out.flush();
  if (!out) throw DataError("cannot write " + path);
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
}

}  // namespace untangle
