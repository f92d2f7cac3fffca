// Copyright 2026 The WiQ Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wiq {

enum class ErrorKind {
  kScriptInvalid,
  kDimension,
  kParameter,
  kConfig,
  kInputTooShort,
  kFragmentTooShort,
  kDegenerateDataset,
  kFormat,
  kStage,
};

std::string_view error_kind_name(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and tests)
// can tell a malformed script from a dimension mismatch without string
// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Harness failures wrap the original error with the pipeline stage that
// raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(ErrorKind::kStage, "[" + stage + "] " + what),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace wiq
