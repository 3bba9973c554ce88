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

// Chat logs, gold dialog annotations and the partitions measured against
// them.
//
// Corpus files are JSON-lines, one utterance per line:
//
//   {"id": "u1", "ts": 1600000000, "author": "alice", "text": "hi",
//    "dialog": "d1"}
//
// "dialog" is optional. Preprocessed corpora additionally carry "tokens", the
// normalized token list. Prediction files use the same line format reduced to
// {"id", "dialog"}, so a corpus with gold labels doubles as a gold file.

#ifndef UNTANGLE_CORPUS_H_
#define UNTANGLE_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace untangle {

struct Utterance {
  std::string id;
  std::int64_t timestamp = 0;  // epoch seconds, UTC
  std::string author;
  std::string raw_text;
  std::vector<std::string> norm_tokens;  // empty until preprocessed
  std::optional<std::string> gold_dialog;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

// An immutable, chronologically ordered chat log. Utterances are sorted by
// (timestamp, id) on construction; ids must be unique, timestamps
// non-negative and authors non-empty (IntegrityError otherwise).
class ChatLog {
 public:
  ChatLog() = default;
  explicit ChatLog(std::vector<Utterance> utterances, std::string project = {});

  std::span<const Utterance> utterances() const { return utterances_; }
  const Utterance& operator[](std::size_t i) const { return utterances_[i]; }
  std::size_t size() const { return utterances_.size(); }
  bool empty() const { return utterances_.empty(); }
  const std::string& project() const { return project_; }

  // Position of `id` in log order.
  std::optional<std::size_t> IndexOf(std::string_view id) const;

  // Ids in log order.
  std::vector<std::string> Ids() const;

  friend bool operator==(const ChatLog& a, const ChatLog& b) {
    return a.project_ == b.project_ && a.utterances_ == b.utterances_;
  }

 private:
  std::vector<Utterance> utterances_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string project_;
};

struct Dialog {
  std::string id;
  std::vector<std::string> members;  // non-empty, in utterance order
};

// A set of pairwise disjoint, non-empty dialogs. The partition also records a
// chronological order over the utterances it covers: members of each dialog
// are kept in that order, and measures use it wherever "earliest" matters.
class Partition {
 public:
  Partition() = default;

  // Throws IntegrityError when a dialog is empty, an utterance appears twice
  // or `order` is non-empty and is not a permutation of the covered ids. An
  // empty `order` means first appearance when reading `dialogs` in sequence.
  explicit Partition(std::vector<Dialog> dialogs,
                     std::vector<std::string> order = {},
                     std::string log_ref = {});

  // Groups (utterance id, dialog label) pairs; dialogs appear in order of
  // their first member, and the pair sequence defines utterance order.
  static Partition FromAssignments(
      std::span<const std::pair<std::string, std::string>> assignments,
      std::string log_ref = {});

  // Same grouping but ordered by `log`; every utterance of the log must be
  // labelled (IncompleteAnnotationError) and no label may name an utterance
  // outside the log (IntegrityError).
  static Partition FromLabels(
      const ChatLog& log,
      const std::unordered_map<std::string, std::string>& labels);

  const std::vector<Dialog>& dialogs() const { return dialogs_; }
  std::size_t size() const { return dialogs_.size(); }
  const std::string& log_ref() const { return log_ref_; }
  const std::vector<std::string>& order() const { return order_; }
  std::size_t utterance_count() const { return order_.size(); }

  // Index into dialogs() of the dialog containing `id`.
  std::optional<std::size_t> DialogOf(std::string_view id) const;

  // Position of `id` in order().
  std::optional<std::size_t> RankOf(std::string_view id) const;

  // Throws IntegrityError unless the covered ids are exactly the log's.
  void CheckCovers(const ChatLog& log) const;

  // Dialogs intersected with `ids`; empty intersections are dropped.
  Partition RestrictTo(const std::unordered_set<std::string>& ids) const;

  // (utterance id, dialog id) pairs in utterance order.
  std::vector<std::pair<std::string, std::string>> Assignments() const;

 private:
  std::vector<Dialog> dialogs_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::size_t> dialog_of_;
  std::unordered_map<std::string, std::size_t> rank_;
  std::string log_ref_;
};

// Reads a corpus file. Blank lines are skipped. Throws ParseError naming the
// line for malformed records and IntegrityError for duplicate ids.
ChatLog ReadChatLog(const std::string& path, std::string project = {});
ChatLog ParseChatLog(std::istream& in, const std::string& source_name,
                     std::string project = {});

// Writes one JSON object per utterance in log order. The inverse of
// ParseChatLog: parsing the output yields an equal ChatLog.
void WriteChatLog(const ChatLog& log, std::ostream& out);

// Reads {"id", "dialog"} pairs in file order. Other keys are ignored, so
// corpus files with gold labels are accepted.
std::vector<std::pair<std::string, std::string>> ReadAssignments(
    const std::string& path);
std::vector<std::pair<std::string, std::string>> ParseAssignments(
    std::istream& in, const std::string& source_name);
void WriteAssignments(const Partition& partition, std::ostream& out);

// Groups utterances by their gold_dialog label.
Partition PartitionFromGold(const ChatLog& log);

}  // namespace untangle

#endif  // UNTANGLE_CORPUS_H_
