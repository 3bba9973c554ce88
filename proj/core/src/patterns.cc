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


#include "untangle/patterns.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <unordered_map>

#include "untangle/csv.h"
#include "untangle/error.h"

namespace untangle {
namespace {

constexpr std::array<const char*, 5> kIntentNames = {"OQ", "PA", "FQ", "FD",
                                                     "CQ"};
constexpr std::array<const char*, 4> kBadCaseNames = {"IIP", "ICI", "MT",
                                                      "IUR"};

// Each step becomes one letter so the patterns can be written as regular
// expressions over a string.
char Encode(const Step& s) {
  return static_cast<char>('a' + 2 * static_cast<int>(s.intent) +
                           static_cast<int>(s.role));
}

// a = <OQ,Pi>, d = <PA,Pr>, e = <FQ,Pi>, h = <FD,Pr>, j = <CQ,Pr>,
// g = <FD,Pi>.
struct CompiledPattern {
  PatternName name;
  std::regex re;
};

const std::vector<CompiledPattern>& Patterns() {
  static const std::vector<CompiledPattern> patterns = {
      {PatternName::kDirectAnswer, std::regex("ad")},
      {PatternName::kClarifyingAnswer, std::regex("ad(eh)+")},
      {PatternName::kClarifyingQuestion, std::regex("a(jg)+d")},
  };
  return patterns;
}

bool EndsWithQuestion(const std::string& text) {
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return end != std::string::npos && text[end] == '?';
}

}  // namespace

const char* IntentName(IntentLabel intent) {
  return kIntentNames[static_cast<std::size_t>(intent)];
}

const char* RoleName(RoleLabel role) {
  return role == RoleLabel::kInitiator ? "Pi" : "Pr";
}

const char* BadCaseName(BadCaseCategory category) {
  return kBadCaseNames[static_cast<std::size_t>(category)];
}

const char* PatternNameString(PatternName pattern) {
  switch (pattern) {
    case PatternName::kDirectAnswer:
      return "DirectAnswer";
    case PatternName::kClarifyingAnswer:
      return "ClarifyingAnswer";
    case PatternName::kClarifyingQuestion:
      return "ClarifyingQuestion";
  }
  return "";
}

IntentLabel ParseIntent(const std::string& name) {
  for (std::size_t i = 0; i < kIntentNames.size(); ++i) {
    if (name == kIntentNames[i]) return static_cast<IntentLabel>(i);
  }
  throw DomainError("unknown intent '" + name + "'");
}

RoleLabel ParseRole(const std::string& name) {
  if (name == "Pi" || name == "Initiator") return RoleLabel::kInitiator;
  if (name == "Pr" || name == "Respondent") return RoleLabel::kRespondent;
  throw DomainError("unknown role '" + name + "'");
}

BadCaseCategory ParseBadCase(const std::string& name) {
  for (std::size_t i = 0; i < kBadCaseNames.size(); ++i) {
    if (name == kBadCaseNames[i]) return static_cast<BadCaseCategory>(i);
  }
  throw DomainError("unknown bad-case category '" + name + "'");
}

std::vector<RoleLabel> AnnotateRoles(std::span<const std::string> authors) {
  std::vector<RoleLabel> roles;
  roles.reserve(authors.size());
  for (const auto& a : authors) {
    roles.push_back(a == authors.front() ? RoleLabel::kInitiator
                                         : RoleLabel::kRespondent);
  }
  return roles;
}

std::vector<IntentLabel> HeuristicIntents(std::span<const std::string> texts,
                                          std::span<const RoleLabel> roles) {
  if (texts.size() != roles.size()) {
    throw ShapeError("intent heuristics need one role per utterance");
  }
  std::vector<IntentLabel> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (i == 0) {
      out.push_back(IntentLabel::kOQ);
    } else if (roles[i] == RoleLabel::kInitiator) {
      out.push_back(EndsWithQuestion(texts[i]) ? IntentLabel::kFQ
                                               : IntentLabel::kFD);
    } else {
      out.push_back(texts[i].find('?') != std::string::npos ? IntentLabel::kCQ
                                                             : IntentLabel::kPA);
    }
  }
  return out;
}

std::optional<PatternMatch> MatchPattern(std::span<const Step> steps) {
  std::string encoded;
  encoded.reserve(steps.size());
  for (const Step& s : steps) encoded.push_back(Encode(s));
  std::optional<PatternMatch> best;
  for (const CompiledPattern& p : Patterns()) {
    // Greedy quantifiers alone do not give the longest prefix for every
    // pattern, so try each prefix length from the longest down.
    for (std::size_t len = encoded.size(); len > 0; --len) {
      if (best && len <= best->length) break;
      if (std::regex_match(encoded.begin(), encoded.begin() + len, p.re)) {
        best = PatternMatch{p.name, len};
        break;
      }
    }
  }
  return best;
}

std::vector<Step> PatternSequence(PatternName pattern,
                                  std::size_t repetitions) {
  using I = IntentLabel;
  const RoleLabel pi = RoleLabel::kInitiator;
  const RoleLabel pr = RoleLabel::kRespondent;
  if (pattern != PatternName::kDirectAnswer && repetitions == 0) {
    throw DomainError("pattern needs at least one repetition");
  }
  std::vector<Step> out = {{I::kOQ, pi}};
  switch (pattern) {
    case PatternName::kDirectAnswer:
      out.push_back({I::kPA, pr});
      break;
    case PatternName::kClarifyingAnswer:
      out.push_back({I::kPA, pr});
      for (std::size_t r = 0; r < repetitions; ++r) {
        out.push_back({I::kFQ, pi});
        out.push_back({I::kFD, pr});
      }
      break;
    case PatternName::kClarifyingQuestion:
      for (std::size_t r = 0; r < repetitions; ++r) {
        out.push_back({I::kCQ, pr});
        out.push_back({I::kFD, pi});
      }
      out.push_back({I::kPA, pr});
      break;
  }
  return out;
}

std::vector<StepOverride> ParseStepOverrides(std::istream& in,
                                             const std::string& source_name) {
  std::vector<StepOverride> out;
  std::set<std::string> seen;
  for (const CsvRow& row :
       ParseCsv(in, source_name, {"utterance_id", "intent", "role"})) {
    StepOverride o;
    o.utterance_id = row.fields[0];
    try {
      o.step = Step{ParseIntent(row.fields[1]), ParseRole(row.fields[2])};
    } catch (const DomainError& e) {
      throw ParseError(source_name, row.line, e.what());
    }
    if (!seen.insert(o.utterance_id).second) {
      throw IntegrityError(source_name + ":" + std::to_string(row.line) +
                           ": repeated utterance " + o.utterance_id);
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<StepOverride> ReadStepOverrides(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ParseStepOverrides(in, path);
}

std::vector<DialogPattern> AnalyzePatterns(
    const ChatLog& log, const Partition& partition,
    std::span<const StepOverride> overrides) {
  std::unordered_map<std::string, Step> by_id;
  for (const auto& o : overrides) by_id[o.utterance_id] = o.step;
  std::vector<DialogPattern> out;
  out.reserve(partition.size());
  for (const Dialog& d : partition.dialogs()) {
    std::vector<std::string> authors, texts;
    for (const auto& id : d.members) {
      auto idx = log.IndexOf(id);
      if (!idx) {
        throw EvaluationDomainError("dialog " + d.id +
                                    " names unknown utterance " + id);
      }
      authors.push_back(log[*idx].author);
      texts.push_back(log[*idx].raw_text);
    }
    std::vector<RoleLabel> roles = AnnotateRoles(authors);
    std::vector<IntentLabel> intents = HeuristicIntents(texts, roles);
    DialogPattern p;
    p.dialog_id = d.id;
    for (std::size_t i = 0; i < d.members.size(); ++i) {
      auto it = by_id.find(d.members[i]);
      p.steps.push_back(it != by_id.end() ? it->second
                                          : Step{intents[i], roles[i]});
    }
    p.match = MatchPattern(p.steps);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<BadCaseLabel> ParseBadCaseLabels(std::istream& in,
                                             const std::string& source_name) {
  std::vector<BadCaseLabel> out;
  std::set<std::string> seen;
  for (const CsvRow& row :
       ParseCsv(in, source_name, {"dialog_id", "project", "category"})) {
    BadCaseLabel l;
    l.dialog_id = row.fields[0];
    l.project = row.fields[1];
    try {
      l.category = ParseBadCase(row.fields[2]);
    } catch (const DomainError& e) {
      throw ParseError(source_name, row.line, e.what());
    }
    if (!seen.insert(l.dialog_id).second) {
      throw IntegrityError(source_name + ":" + std::to_string(row.line) +
                           ": repeated dialog " + l.dialog_id);
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<BadCaseLabel> ReadBadCaseLabels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ParseBadCaseLabels(in, path);
}

BadCaseReport SummarizeBadCases(std::span<const BadCaseLabel> labels) {
  BadCaseReport report;
  auto add = [](CategoryDistribution& d, BadCaseCategory c) {
    ++d.total;
    ++d.counts[static_cast<std::size_t>(c)];
  };
  for (const auto& l : labels) {
    add(report.overall, l.category);
    add(report.by_project[l.project], l.category);
  }
  auto finish = [](CategoryDistribution& d) {
    if (d.total == 0) return;
    for (std::size_t i = 0; i < kBadCaseCategoryCount; ++i) {
      d.percent[i] = 100.0 * static_cast<double>(d.counts[i]) /
                     static_cast<double>(d.total);
    }
  };
  finish(report.overall);
  for (auto& [project, d] : report.by_project) finish(d);
  return report;
}

}  // namespace untangle
