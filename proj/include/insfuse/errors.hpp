/*
 * Copyright 2026 The insfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef INSFUSE_ERRORS_HPP_
#define INSFUSE_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace insfuse {

// Malformed input text. line() is 1-based; field() names the offending column.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", field \"" +
                           field + "\": " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Well-formed number outside its declared domain.
class RangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

// A table violates a cross-record invariant (duplicates, ordinal gaps, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two tables disagree (detection outside its shot, unknown shot, ...).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation requested for a topic with no relevant shot in the qrels.
class UndefinedTopicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace insfuse

#endif  // INSFUSE_ERRORS_HPP_
