// Copyright 2026 The mot_hijack Authors
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

#include <stdexcept>
#include <string>

namespace mothijack {

/// Base of every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (scenario files, configs). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::string const& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// No shift along the requested direction satisfies both the association
/// gate and the patch-overlap constraint.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// The box to erase is not present in the detection list.
class TargetMissing : public Error {
 public:
  using Error::Error;
};

/// The patch optimizer could not decrease the loss even once.
class NonDecreasing : public Error {
 public:
  using Error::Error;
};

/// min_frames found no successful attack length within the scenario.
class NoSuccess : public Error {
 public:
  using Error::Error;
};

}  // namespace mothijack
