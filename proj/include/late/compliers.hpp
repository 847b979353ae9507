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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "late/curves.hpp"
#include "late/sample.hpp"

namespace late {

// P(Z = 1 | X = x) keyed by covariate codes.
using PzMap = std::map<std::vector<int>, double>;

struct KappaResult {
  std::vector<double> kappa;
  PzMap pz;
  std::vector<std::string> flags;
};

// kappa = 1 - D (1 - Z) / P(Z = 0 | X) - (1 - D) Z / P(Z = 1 | X) for a
// binary instrument and treatment. Without `pz` the instrument probability
// is the weighted cell frequency ("pz_estimated").
KappaResult kappa(const ObservedSample& s, const std::optional<PzMap>& pz = std::nullopt);

// E[kappa g] / E[kappa].
double complier_mean(const ObservedSample& s, const RowFunction& g,
                     const std::optional<PzMap>& pz = std::nullopt);

// P(C | X = x) / P(C): within-cell first stage over the overall first stage.
double bayes_ratio(const ObservedSample& s, const std::vector<int>& x);

// Complier distribution of Y(arm) from indicator Wald ratios, evaluated at
// `y_grid` (default: sorted distinct outcomes). Clipped to [0, 1] and
// rearranged to be monotone; "clipped" / "rearranged" flag repairs.
StepCurve complier_outcome_cdf(const ObservedSample& s, int arm,
                               std::vector<double> y_grid = {});

// Difference of left-continuous complier quantiles at tau.
double qte(const ObservedSample& s, double tau);

struct ComplierProfile {
  double share = 0.0;
  double share_of_treated = 0.0;
  // Covariate cell description -> P(C | X = x) / P(C).
  std::vector<std::pair<std::string, double>> covariate_ratios;
  StepCurve outcome_cdf_0;
  StepCurve outcome_cdf_1;
  double kappa_mean = 0.0;
  double kappa_negative_fraction = 0.0;
  std::vector<std::string> flags;
};

ComplierProfile profile_compliers(const ObservedSample& s);

}  // namespace late
