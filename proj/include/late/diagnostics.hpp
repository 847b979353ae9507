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
#include <utility>
#include <vector>

#include "late/covariate_spec.hpp"
#include "late/population.hpp"
#include "late/sample.hpp"

namespace late {

// Sample-level checks.

struct MonotonicityResult {
  // P(D >= j | Z = 1) - P(D >= j | Z = 0), j = 1..J.
  std::vector<double> differences;
  // Tolerance applied to each level; a level crosses if its difference is
  // below -epsilon.
  std::vector<double> epsilon;
  std::vector<int> crossing_levels;
  bool consistent = true;
  std::string verdict;
};

MonotonicityResult monotonicity_check(const ObservedSample& s, double epsilon = 0.0);

// Tolerances from a one-sided bootstrap band: epsilon_j is the `level`
// quantile of (difference_j - replicate difference_j).
MonotonicityResult monotonicity_check_bootstrap(const ObservedSample& s, std::uint64_t seed,
                                                std::size_t B = 500, double level = 0.95);

struct RelevanceResult {
  double first_stage = 0.0;
  bool pass = true;
  std::vector<std::string> flags;
};

// Errors (weak instrument) when |first stage| <= 1e-12; flags
// "weak_instrument" below `threshold`.
RelevanceResult relevance_check(const ObservedSample& s, double threshold = 0.01);

struct SaturationVerdict {
  bool pass = true;
  std::string verdict;  // "saturated", "trivially_saturated" or "refused"
  std::string reason;
  std::vector<std::string> flags;
};

SaturationVerdict saturation_check(const ObservedSample& s, const CovariateSpecification& spec);

// Population-level sensitivity computations.

struct SensitivityReport {
  std::string scenario_id;
  double true_late = 0.0;
  double biased_estimand = 0.0;
  double bias = 0.0;
  std::vector<std::pair<std::string, double>> drivers;
  bool sign_reversed = false;
  // Enumerated estimand minus the closed form built from the drivers.
  double identity_residual = 0.0;
  bool identity_holds = true;
};

// Wald bias from a direct instrument effect H = Y(1, d) - Y(0, d) on
// noncompliers: bias = E[H | NC] * P(NC) / P(C). Compliers must satisfy
// exclusion and there must be no defiers.
SensitivityReport exclusion_sensitivity(const Population& pop, std::string scenario_id = "");

// Wald estimand with defiers: (1 + lambda) delta_C - lambda delta_D with
// lambda = P(D) / (P(C) - P(D)).
SensitivityReport defier_sensitivity(const Population& pop, std::string scenario_id = "");

struct OlsDecomposition {
  double beta_d = 0.0;
  double att = 0.0;
  double selection_bias = 0.0;
  double residual = 0.0;
};

// beta_D = ATT + B with B = E[Y(0) | D = 1] - E[Y(0) | D = 0].
OlsDecomposition ols_decomposition(const Population& pop);

struct WeightedEffect {
  double beta_d = 0.0;
  double weighted_effect = 0.0;  // E[W Delta]
  double mean_w = 0.0;
  double min_w = 0.0;
  double max_w = 0.0;
  double residual = 0.0;
};

// Needs the "AS" and "L" scenario tags.
WeightedEffect ols_weighted_effect(const Population& pop);

struct MisparameterizationRecord {
  int threshold = 1;
  double recoded_wald = 0.0;
  double acr = 0.0;
  double ratio = 0.0;
  bool sign_agrees = true;
};

// Wald with D recoded to 1{D >= threshold}, against the true ACR.
MisparameterizationRecord misparameterization_experiment(const Population& pop, int threshold);

}  // namespace late
