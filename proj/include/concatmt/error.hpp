// Copyright 2026 The concatmt Authors
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

namespace concatmt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data: misaligned files, empty lines, bad UTF-8, broken
/// invariants on user-supplied corpora or configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A requested operation cannot be satisfied with the given data, e.g. a
/// sample larger than its corpus or an unreachable length threshold.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An external translator failed: nonzero exit, timeout, or bad output.
class TranslatorError : public Error {
 public:
  TranslatorError(const std::string& what, std::string diagnostics = {})
      : Error(what), diagnostics_(std::move(diagnostics)) {}

  /// Captured stdout/stderr of the failed child, possibly empty.
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace concatmt
