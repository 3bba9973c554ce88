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

#include "untangle/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>

#include <nlohmann/json.hpp>

#include "untangle/error.h"

namespace untangle {

using json = nlohmann::json;

IncompleteAnnotationError::IncompleteAnnotationError(
    std::vector<std::string> ids)
    : DataError([&] {
        std::string msg = "utterances without a gold dialog:";
        for (const auto& id : ids) msg += " " + id;
        return msg;
      }()),
      ids_(std::move(ids)) {}

ChatLog::ChatLog(std::vector<Utterance> utterances, std::string project)
    : utterances_(std::move(utterances)), project_(std::move(project)) {
  std::stable_sort(utterances_.begin(), utterances_.end(),
                   [](const Utterance& a, const Utterance& b) {
                     if (a.timestamp != b.timestamp) {
                       return a.timestamp < b.timestamp;
                     }
                     return a.id < b.id;
                   });
  index_.reserve(utterances_.size());
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const Utterance& u = utterances_[i];
    if (u.timestamp < 0) {
      throw IntegrityError("utterance " + u.id + " has a negative timestamp");
    }
    if (u.author.empty()) {
      throw IntegrityError("utterance " + u.id + " has an empty author");
    }
    if (!index_.emplace(u.id, i).second) {
      throw IntegrityError("duplicate utterance id " + u.id);
    }
  }
}

std::optional<std::size_t> ChatLog::IndexOf(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ChatLog::Ids() const {
  std::vector<std::string> ids;
  ids.reserve(utterances_.size());
  for (const auto& u : utterances_) ids.push_back(u.id);
  return ids;
}

Partition::Partition(std::vector<Dialog> dialogs,
                     std::vector<std::string> order, std::string log_ref)
    : dialogs_(std::move(dialogs)), log_ref_(std::move(log_ref)) {
  for (std::size_t d = 0; d < dialogs_.size(); ++d) {
    if (dialogs_[d].members.empty()) {
      throw IntegrityError("dialog " + dialogs_[d].id + " is empty");
    }
    for (const auto& id : dialogs_[d].members) {
      if (!dialog_of_.emplace(id, d).second) {
        throw IntegrityError("utterance " + id +
                             " appears in more than one dialog");
      }
    }
  }
  if (order.empty()) {
    order_.reserve(dialog_of_.size());
    for (const auto& dialog : dialogs_) {
      order_.insert(order_.end(), dialog.members.begin(),
                    dialog.members.end());
    }
  } else {
    order_ = std::move(order);
  }
  if (order_.size() != dialog_of_.size()) {
    throw IntegrityError("utterance order does not match partition members");
  }
  rank_.reserve(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (!dialog_of_.contains(order_[i]) || !rank_.emplace(order_[i], i).second) {
      throw IntegrityError("utterance order does not match partition members");
    }
  }
  for (auto& dialog : dialogs_) {
    std::sort(dialog.members.begin(), dialog.members.end(),
              [&](const std::string& a, const std::string& b) {
                return rank_.at(a) < rank_.at(b);
              });
  }
}

Partition Partition::FromAssignments(
    std::span<const std::pair<std::string, std::string>> assignments,
    std::string log_ref) {
  std::vector<Dialog> dialogs;
  std::unordered_map<std::string, std::size_t> by_label;
  std::vector<std::string> order;
  order.reserve(assignments.size());
  for (const auto& [id, label] : assignments) {
    auto [it, inserted] = by_label.emplace(label, dialogs.size());
    if (inserted) dialogs.push_back(Dialog{label, {}});
    dialogs[it->second].members.push_back(id);
    order.push_back(id);
  }
  return Partition(std::move(dialogs), std::move(order), std::move(log_ref));
}

Partition Partition::FromLabels(
    const ChatLog& log,
    const std::unordered_map<std::string, std::string>& labels) {
  std::vector<std::string> missing;
  std::vector<std::pair<std::string, std::string>> assignments;
  assignments.reserve(log.size());
  for (const auto& u : log.utterances()) {
    auto it = labels.find(u.id);
    if (it == labels.end()) {
      missing.push_back(u.id);
    } else {
      assignments.emplace_back(u.id, it->second);
    }
  }
  if (!missing.empty()) throw IncompleteAnnotationError(std::move(missing));
  if (labels.size() != log.size()) {
    for (const auto& [id, label] : labels) {
      if (!log.IndexOf(id)) {
        throw IntegrityError("labelled utterance " + id + " is not in the log");
      }
    }
  }
  return FromAssignments(assignments, log.project());
}

std::optional<std::size_t> Partition::DialogOf(std::string_view id) const {
  auto it = dialog_of_.find(std::string(id));
  if (it == dialog_of_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Partition::RankOf(std::string_view id) const {
  auto it = rank_.find(std::string(id));
  if (it == rank_.end()) return std::nullopt;
  return it->second;
}

void Partition::CheckCovers(const ChatLog& log) const {
  if (log.size() != order_.size()) {
    throw IntegrityError("partition covers " + std::to_string(order_.size()) +
                         " utterances but the log has " +
                         std::to_string(log.size()));
  }
  for (const auto& u : log.utterances()) {
    if (!dialog_of_.contains(u.id)) {
      throw IntegrityError("utterance " + u.id + " is not in the partition");
    }
  }
}

Partition Partition::RestrictTo(
    const std::unordered_set<std::string>& ids) const {
  std::vector<Dialog> dialogs;
  for (const auto& dialog : dialogs_) {
    Dialog kept{dialog.id, {}};
    for (const auto& id : dialog.members) {
      if (ids.contains(id)) kept.members.push_back(id);
    }
    if (!kept.members.empty()) dialogs.push_back(std::move(kept));
  }
  std::vector<std::string> order;
  for (const auto& id : order_) {
    if (ids.contains(id)) order.push_back(id);
  }
  return Partition(std::move(dialogs), std::move(order), log_ref_);
}

std::vector<std::pair<std::string, std::string>> Partition::Assignments()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(order_.size());
  for (const auto& id : order_) {
    out.emplace_back(id, dialogs_[dialog_of_.at(id)].id);
  }
  return out;
}

namespace {

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

bool IsBlank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

const json& RequireField(const json& record, const char* key,
                         json::value_t type, const std::string& source,
                         std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) {
    throw ParseError(source, line, std::string("missing field \"") + key + "\"");
  }
  bool ok = it->type() == type ||
            (type == json::value_t::number_integer &&
             it->type() == json::value_t::number_unsigned);
  if (!ok) {
    throw ParseError(source, line,
                     std::string("field \"") + key + "\" has the wrong type");
  }
  return *it;
}

json ParseLine(const std::string& text, const std::string& source,
               std::size_t line) {
  json record;
  try {
    record = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line, "invalid JSON");
  }
  if (!record.is_object()) throw ParseError(source, line, "expected an object");
  return record;
}

}  // namespace

ChatLog ParseChatLog(std::istream& in, const std::string& source_name,
                     std::string project) {
  std::vector<Utterance> utterances;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (IsBlank(text)) continue;
    json record = ParseLine(text, source_name, line);
    Utterance u;
    u.id = RequireField(record, "id", json::value_t::string, source_name, line)
               .get<std::string>();
    const json& ts = RequireField(record, "ts", json::value_t::number_integer,
                                  source_name, line);
    u.timestamp = ts.get<std::int64_t>();
    if (u.timestamp < 0 ||
        (ts.is_number_unsigned() && ts.get<std::uint64_t>() > INT64_MAX)) {
      throw ParseError(source_name, line, "field \"ts\" must be non-negative");
    }
    u.author = RequireField(record, "author", json::value_t::string,
                            source_name, line)
                   .get<std::string>();
    if (u.author.empty()) {
      throw ParseError(source_name, line, "field \"author\" is empty");
    }
    u.raw_text = RequireField(record, "text", json::value_t::string,
                              source_name, line)
                     .get<std::string>();
    if (auto it = record.find("dialog"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ParseError(source_name, line,
                         "field \"dialog\" has the wrong type");
      }
      u.gold_dialog = it->get<std::string>();
    }
    if (auto it = record.find("tokens"); it != record.end()) {
      if (!it->is_array()) {
        throw ParseError(source_name, line,
                         "field \"tokens\" has the wrong type");
      }
      for (const auto& token : *it) {
        if (!token.is_string()) {
          throw ParseError(source_name, line,
                           "field \"tokens\" has the wrong type");
        }
        u.norm_tokens.push_back(token.get<std::string>());
      }
    }
    if (!seen.insert(u.id).second) {
      throw IntegrityError(source_name + ":" + std::to_string(line) +
                           ": duplicate utterance id " + u.id);
    }
    utterances.push_back(std::move(u));
  }
  return ChatLog(std::move(utterances), std::move(project));
}

ChatLog ReadChatLog(const std::string& path, std::string project) {
  std::ifstream in = OpenOrThrow(path);
  return ParseChatLog(in, path, std::move(project));
}

void WriteChatLog(const ChatLog& log, std::ostream& out) {
  for (const auto& u : log.utterances()) {
    json record = {{"id", u.id},
                   {"ts", u.timestamp},
                   {"author", u.author},
                   {"text", u.raw_text}};
    if (u.gold_dialog) record["dialog"] = *u.gold_dialog;
    if (!u.norm_tokens.empty()) record["tokens"] = u.norm_tokens;
    out << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> ParseAssignments(
    std::istream& in, const std::string& source_name) {
  std::vector<std::pair<std::string, std::string>> out;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (IsBlank(text)) continue;
    json record = ParseLine(text, source_name, line);
    auto id = RequireField(record, "id", json::value_t::string, source_name,
                           line)
                  .get<std::string>();
    auto dialog = RequireField(record, "dialog", json::value_t::string,
                               source_name, line)
                      .get<std::string>();
    if (!seen.insert(id).second) {
      throw IntegrityError(source_name + ":" + std::to_string(line) +
                           ": duplicate utterance id " + id);
    }
    out.emplace_back(std::move(id), std::move(dialog));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> ReadAssignments(
    const std::string& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseAssignments(in, path);
}

void WriteAssignments(const Partition& partition, std::ostream& out) {
  for (const auto& [id, dialog] : partition.Assignments()) {
    json record = {{"id", id}, {"dialog", dialog}};
    out << record.dump() << '\n';
  }
}

Partition PartitionFromGold(const ChatLog& log) {
  std::unordered_map<std::string, std::string> labels;
  labels.reserve(log.size());
  for (const auto& u : log.utterances()) {
    if (u.gold_dialog) labels.emplace(u.id, *u.gold_dialog);
  }
  return Partition::FromLabels(log, labels);
}

}  // namespace untangle
