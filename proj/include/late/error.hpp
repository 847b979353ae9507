// Copyright 2026 The late-engine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace late {

// Machine-readable failure categories. The CLI maps these to exit codes
// and to the "error" field of its JSON output.
enum class ErrorCode {
  kInvalidArgument,
  kConfig,
  kIdentification,   // target parameter not identified (no switchers, ...)
  kConditioning,     // conditioning event has zero mass
  kWeakInstrument,
  kMonotonicity,
  kEstimation,       // rank deficiency and similar
  kInference,        // bootstrap too fragile
  kUnsupportedScenario,
  kUnsupportedClassification,
  kNonSaturated,
  kIo,
  kParse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// Hard floor below which denominators are treated as zero.
inline constexpr double kZeroTolerance = 1e-12;

}  // namespace late
