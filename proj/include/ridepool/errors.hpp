// Copyright 2026 The Ridepool Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ridepool {

// Bad caller-supplied value (unknown node, empty dataset, inconsistent
// configuration).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. The line number is 1-based; 0 means "whole file".
class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a model invariant (disconnected network,
// request naming a node that does not exist).
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace ridepool
