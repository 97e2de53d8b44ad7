//
// Copyright 2026 The trustml Authors
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
//

#pragma once

#include <stdexcept>
#include <string>

namespace trustml {

enum class ErrorCode {
  invalid_input,
  invalid_config,
  insufficient_groups,
  missing_truths,
  degenerate_group,
  corrupt_update,
  schema_violation,
  training_diverged,
};

/// Library-wide exception. The code distinguishes caller mistakes
/// (invalid_input, invalid_config, schema_violation, ...) from numerical
/// failures (training_diverged); the CLI maps codes to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace trustml
