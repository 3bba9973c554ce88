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

#ifndef UNTANGLE_ERROR_H_
#define UNTANGLE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace untangle {

// Base class for every error raised by the library. DataError and its
// subclasses signal bad input (the CLI maps them to exit status 2); anything
// else that escapes is treated as an internal failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed record in a line-oriented input file.
class ParseError : public DataError {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Well-formed records that violate a uniqueness or consistency invariant.
class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

class IncompleteAnnotationError : public DataError {
 public:
  explicit IncompleteAnnotationError(std::vector<std::string> ids);

  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

// Two partitions handed to a measure do not cover the same utterances.
class EvaluationDomainError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

// Argument outside the mathematical domain of a function.
class DomainError : public DataError {
 public:
  using DataError::DataError;
};

// Feature vector or parameter array whose length disagrees with a model.
class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

class OrderingError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace untangle

#endif  // UNTANGLE_ERROR_H_
