// Copyright 2026 The vdaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VDAUDIT_ERROR_HPP_
#define VDAUDIT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vdaudit {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV or JSON input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A malformed or invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Header/column disagreement between a CSV file and its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A protected column holds a raw value that the group map does not cover.
class GroupMapError : public Error {
 public:
  using Error::Error;
};

// A metric whose denominator is empty (e.g. a group without members).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

// Iterative solver gave up; carries the last objective value.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace vdaudit

#endif  // VDAUDIT_ERROR_HPP_
