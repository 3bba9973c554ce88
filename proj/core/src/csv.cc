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

#include "untangle/csv.h"

#include <fstream>
#include <istream>

#include "untangle/error.h"

namespace untangle {
namespace {

std::string Trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitRow(const std::string& line,
                                  const std::string& source, std::size_t no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && Trim(field).empty()) {
      quoted = true;
      was_quoted = true;
      field.clear();
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : Trim(field));
      field.clear();
      was_quoted = false;
    } else if (!was_quoted) {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(source, no, "unterminated quoted field");
  fields.push_back(was_quoted ? field : Trim(field));
  return fields;
}

}  // namespace

std::vector<CsvRow> ParseCsv(std::istream& in, const std::string& source_name,
                             const std::vector<std::string>& header) {
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++no;
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields = SplitRow(line, source_name, no);
    if (!seen_header) {
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw ParseError(source_name, no, "expected header " + expected);
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError(source_name, no,
                       "expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()));
    }
    rows.push_back(CsvRow{no, std::move(fields)});
  }
  if (!seen_header) throw ParseError(source_name, no, "missing header");
  return rows;
}

std::vector<CsvRow> ReadCsv(const std::string& path,
                            const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ParseCsv(in, path, header);
}

}  // namespace untangle
