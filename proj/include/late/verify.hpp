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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace late {

struct VerifyCheck {
  std::string name;
  std::string statement;
  bool pass = false;
  // Largest absolute discrepancy seen across the cases of this check.
  double max_error = 0.0;
  std::size_t cases = 0;
  std::string detail;
};

struct VerifyOptions {
  std::size_t seeds = 50;
  std::uint64_t seed = 1;
};

// Oracle-equality suite over the shipped fixtures and seeded scenario
// batteries: each identification result is checked as an equality between
// an observable estimand and its counterfactual expression.
std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& opt = {});

}  // namespace late
