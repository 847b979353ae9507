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

#include "late/random.hpp"

#include <cmath>
#include <numbers>

#include "late/error.hpp"

namespace late {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kIdentification: return "identification_error";
    case ErrorCode::kConditioning: return "conditioning_error";
    case ErrorCode::kWeakInstrument: return "weak_instrument";
    case ErrorCode::kMonotonicity: return "monotonicity_violation";
    case ErrorCode::kEstimation: return "estimation_error";
    case ErrorCode::kInference: return "inference_error";
    case ErrorCode::kUnsupportedScenario: return "unsupported_scenario";
    case ErrorCode::kUnsupportedClassification: return "unsupported_classification";
    case ErrorCode::kNonSaturated: return "non_saturated_specification";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kParse: return "parse_error";
  }
  return "unknown_error";
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double sd) {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire-style rejection keeps the draw unbiased.
  const std::uint64_t limit = -n % n;
  std::uint64_t x = engine_();
  while (x < limit) x = engine_();
  return x % n;
}

}  // namespace late
