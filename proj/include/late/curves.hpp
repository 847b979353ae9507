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

#include <string>
#include <vector>

namespace late {

// Right-continuous step function F on sorted knots: F(t) = F[i] for
// y[i] <= t < y[i+1], and 0 left of y[0].
struct StepCurve {
  std::vector<double> y;
  std::vector<double> F;
  std::vector<std::string> flags;

  double operator()(double t) const;
};

// Slack used when comparing cumulative probabilities with a quantile level,
// so that sums carrying rounding noise still hit exact jumps.
inline constexpr double kQuantileSlack = 1e-12;

// Left-continuous inverse inf{y : F(y) >= tau}.
double left_inverse(const StepCurve& curve, double tau);

}  // namespace late
