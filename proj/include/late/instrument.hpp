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
#include <string>
#include <vector>

namespace late {

// Instrument transformation g(Z) used by covariance-ratio estimands.
struct InstrumentFunction {
  enum class Kind {
    kIdentity,    // g(z) = z
    kPropensity,  // g(z) = E[D | Z = z]
    kTable,       // one value per instrument support point
  };

  Kind kind = Kind::kIdentity;
  std::vector<double> values;

  static InstrumentFunction identity() { return {}; }
  static InstrumentFunction propensity() { return {Kind::kPropensity, {}}; }
  static InstrumentFunction table(std::vector<double> v) {
    return {Kind::kTable, std::move(v)};
  }

  // Evaluates g on the support given the conditional treatment means there.
  std::vector<double> evaluate(const std::vector<double>& z_support,
                               const std::vector<double>& mean_d) const;
  std::string name() const;
};

}  // namespace late
