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


// JSON serialization of models and reports. Keys are emitted in sorted
// order so reports diff cleanly.

#ifndef UNTANGLE_REPORT_IO_H_
#define UNTANGLE_REPORT_IO_H_

#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "untangle/linker.h"
#include "untangle/measures.h"
#include "untangle/patterns.h"
#include "untangle/stats.h"

namespace untangle {

using Json = nlohmann::json;

// Doubles are written with enough digits to round-trip exactly.
Json ModelToJson(const LinkModel& model);

// Throws ParseError on missing or mistyped fields and ShapeError on
// inconsistent dimensions or a feature schema this build does not know.
LinkModel ModelFromJson(const Json& j, const std::string& source_name);

void SaveModel(const LinkModel& model, const std::string& path);
LinkModel LoadModel(const std::string& path);

// Only the requested measures appear. `dld_pairs` adds the per-dialog
// pairing detail.
Json MeasureReportToJson(const MeasureReport& report, bool dld_pairs = true);

Json DialogScoresToJson(std::span<const DialogScores> scores);

// "pearson" and "kappa" are null when undefined.
Json TestResultToJson(const TestResult& result, bool anova);
Json StatsReportToJson(const StatsReport& report);

Json PatternReportToJson(std::span<const DialogPattern> dialogs,
                         const std::optional<BadCaseReport>& bad_cases);
Json BadCaseReportToJson(const BadCaseReport& report);

// Two-space indented JSON followed by a newline; non-UTF-8 bytes replaced.
std::string DumpJson(const Json& j);

// Writes DumpJson(j) to `path`. Throws DataError if the file cannot be
// written.
void WriteJsonFile(const Json& j, const std::string& path);

// Throws DataError if unreadable and ParseError if not JSON.
Json ReadJsonFile(const std::string& path);

}  // namespace untangle

#endif  // UNTANGLE_REPORT_IO_H_
