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

#ifndef UNTANGLE_CSV_H_
#define UNTANGLE_CSV_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace untangle {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Reads a small comma-separated file whose first line must equal `header`
// (after trimming). Fields may be double-quoted; surrounding whitespace is
// trimmed. Every row must have as many fields as the header. Blank lines
// are skipped.
std::vector<CsvRow> ParseCsv(std::istream& in, const std::string& source_name,
                             const std::vector<std::string>& header);
std::vector<CsvRow> ReadCsv(const std::string& path,
                            const std::vector<std::string>& header);

}  // namespace untangle

#endif  // UNTANGLE_CSV_H_
