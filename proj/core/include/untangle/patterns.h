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


// Interaction-pattern analysis of question/answer dialogs. Each utterance
// carries an intent and a role; a dialog opens with one of three patterns
// (direct answer, clarifying answer, clarifying question) or none. Bad-case
// categories are ingested from human labels and summarized.

#ifndef UNTANGLE_PATTERNS_H_
#define UNTANGLE_PATTERNS_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "untangle/corpus.h"

namespace untangle {

enum class IntentLabel { kOQ, kPA, kFQ, kFD, kCQ };
enum class RoleLabel { kInitiator, kRespondent };
enum class BadCaseCategory { kIIP, kICI, kMT, kIUR };
enum class PatternName { kDirectAnswer, kClarifyingAnswer, kClarifyingQuestion };

inline constexpr std::size_t kBadCaseCategoryCount = 4;

// Names: OQ/PA/FQ/FD/CQ, Pi/Pr, IIP/ICI/MT/IUR, DirectAnswer/... The parsers
// throw DomainError on unknown names. ParseRole also accepts Initiator and
// Respondent.
const char* IntentName(IntentLabel intent);
const char* RoleName(RoleLabel role);
const char* BadCaseName(BadCaseCategory category);
const char* PatternNameString(PatternName pattern);
IntentLabel ParseIntent(const std::string& name);
RoleLabel ParseRole(const std::string& name);
BadCaseCategory ParseBadCase(const std::string& name);

struct Step {
  IntentLabel intent;
  RoleLabel role;
  friend bool operator==(const Step&, const Step&) = default;
};

// Authors equal to the first author are initiators; everyone else shares
// the single respondent role.
std::vector<RoleLabel> AnnotateRoles(std::span<const std::string> authors);

// Rule cascade over raw texts: first -> OQ; initiator -> FQ if the text ends
// with '?' (ignoring trailing whitespace) else FD; respondent -> CQ if the
// text contains '?' else PA. Throws ShapeError when the spans differ in
// length.
std::vector<IntentLabel> HeuristicIntents(std::span<const std::string> texts,
                                          std::span<const RoleLabel> roles);

struct PatternMatch {
  PatternName pattern;
  std::size_t length = 0;  // steps consumed from the start of the sequence
};

// Longest pattern matching a prefix of `steps`.
std::optional<PatternMatch> MatchPattern(std::span<const Step> steps);

// The defining sequence of a pattern with `repetitions` cycles (ignored for
// DirectAnswer). Throws DomainError when repetitions is 0 for the others.
std::vector<Step> PatternSequence(PatternName pattern, std::size_t repetitions);

// Per-utterance override of the heuristics, CSV utterance_id,intent,role.
struct StepOverride {
  std::string utterance_id;
  Step step;
};
std::vector<StepOverride> ParseStepOverrides(std::istream& in,
                                             const std::string& source_name);
std::vector<StepOverride> ReadStepOverrides(const std::string& path);

struct DialogPattern {
  std::string dialog_id;
  std::vector<Step> steps;
  std::optional<PatternMatch> match;
};

// Annotates every dialog of `partition` (ids resolved against `log`) and
// matches its pattern. Overrides replace heuristic labels per utterance.
std::vector<DialogPattern> AnalyzePatterns(
    const ChatLog& log, const Partition& partition,
    std::span<const StepOverride> overrides = {});

// Bad-case labels, CSV dialog_id,project,category.
struct BadCaseLabel {
  std::string dialog_id;
  std::string project;
  BadCaseCategory category;
};
std::vector<BadCaseLabel> ParseBadCaseLabels(std::istream& in,
                                             const std::string& source_name);
std::vector<BadCaseLabel> ReadBadCaseLabels(const std::string& path);

struct CategoryDistribution {
  std::size_t total = 0;
  std::array<std::size_t, kBadCaseCategoryCount> counts{};
  std::array<double, kBadCaseCategoryCount> percent{};  // 0 when total is 0
};

struct BadCaseReport {
  CategoryDistribution overall;
  std::map<std::string, CategoryDistribution> by_project;
};

BadCaseReport SummarizeBadCases(std::span<const BadCaseLabel> labels);

}  // namespace untangle

#endif  // UNTANGLE_PATTERNS_H_
