// Copyright 2026 The Topoxform Authors.
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

namespace topoxform {

// Broad failure classes; the C API and CLI map these onto status/exit codes.
enum class ErrorKind {
  kInvalidArgument,  // caller violated a precondition or config invariant
  kData,             // malformed or inconsistent input files / datasets
  kNumerical,        // non-finite values, divergence
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& message) {
  throw Error(ErrorKind::kInvalidArgument, message);
}

[[noreturn]] inline void throw_data(const std::string& message) {
  throw Error(ErrorKind::kData, message);
}

[[noreturn]] inline void throw_numerical(const std::string& message) {
  throw Error(ErrorKind::kNumerical, message);
}

}  // namespace topoxform
