/*
 Copyright 2026 The varlift Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varlift {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the
/// offending token in the source string.
class ParseError : public Error {
 public:
  enum class Kind { kSyntax, kUnknownIdentifier, kVariableOutOfRange };

  ParseError(Kind kind, std::size_t offset, const std::string& message)
      : Error(message + " (at byte " + std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Evaluation outside the domain of a component function (log of a
/// non-positive number, division by zero, ...). `component()` is the index of
/// the output component that failed, or -1 when unknown.
class DomainError : public Error {
 public:
  DomainError(int component, const std::string& message)
      : Error(component >= 0
                  ? "component " + std::to_string(component) + ": " + message
                  : message),
        component_(component) {}

  int component() const { return component_; }

 private:
  int component_;
};

/// Inconsistent dimensions or violated preconditions on the shape of inputs.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace varlift
