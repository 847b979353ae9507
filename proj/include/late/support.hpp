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
#include <span>
#include <string>
#include <vector>

namespace late {

// Support of the treatment: ordered levels {0..max_level} or a declared
// interval for continuous doses.
struct TreatmentSupport {
  enum class Kind { kDiscrete, kContinuous };

  Kind kind = Kind::kDiscrete;
  int max_level = 1;
  double lo = 0.0;
  double hi = 1.0;
  // Number of grid points for integration over doses.
  int grid_size = 513;

  static TreatmentSupport discrete(int max_level);
  static TreatmentSupport continuous(double lo, double hi, int grid_size = 513);

  bool is_discrete() const { return kind == Kind::kDiscrete; }
  bool is_continuous() const { return kind == Kind::kContinuous; }
  bool is_binary() const { return is_discrete() && max_level == 1; }
  std::size_t num_levels() const { return static_cast<std::size_t>(max_level) + 1; }

  bool operator==(const TreatmentSupport&) const = default;
};

// Names and label sets of the discrete covariates. Rows and units store
// covariates as label codes (indices into `labels[k]`).
struct CovariateSchema {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> labels;

  std::size_t size() const { return names.size(); }
  bool empty() const { return names.empty(); }
  // "name=label|name=label"; "(all)" for an empty schema.
  std::string describe(std::span<const int> codes) const;
  int code_of(std::size_t covariate, const std::string& label) const;

  bool operator==(const CovariateSchema&) const = default;
};

}  // namespace late
