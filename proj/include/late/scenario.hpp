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
#include <optional>
#include <string>
#include <vector>

#include "late/population.hpp"

namespace late {

// A group of units sharing one treatment response D(z).
struct ComplianceProfile {
  std::string label;
  std::vector<double> d_of_z;
  double share = 0.0;
  // Distribution over the labels of the single covariate; empty = uniform.
  std::vector<double> x_probs;
  // Added to every per-level effect of units in this profile.
  double effect_shift = 0.0;
};

// Binary instrument and treatment shorthand.
struct TypeShares {
  double never_taker = 0.0;
  double complier = 0.0;
  double defier = 0.0;
  double always_taker = 0.0;
};

struct OutcomeModel {
  double baseline_mean = 0.0;
  double baseline_sd = 1.0;
  // Per-level (or slope, for continuous doses) effects are uniform on
  // [effect_lo, effect_hi] before profile and covariate shifts.
  double effect_lo = 0.5;
  double effect_hi = 1.5;
  // Continuous doses: Y(d) = a + b d + c d^2 + e d^3 + s sin(f d) with c
  // drawn uniformly from [0, curvature] and b as above.
  double curvature = 0.0;
  double cubic = 0.0;
  double sine_amplitude = 0.0;
  double sine_frequency = 1.0;
  // Continuous doses: every unit shifts its whole D(z) profile by
  // U(-jitter, jitter), clamped to the support.
  double dose_jitter = 0.0;
};

struct ScenarioConfig {
  std::string id = "scenario";
  std::vector<double> z_support{0.0, 1.0};
  std::vector<double> z_dist{0.5, 0.5};
  TreatmentSupport d_support = TreatmentSupport::discrete(1);
  // Units per unit of share; each profile gets max(1, round(share * n)).
  std::size_t n_units = 40;
  std::optional<TypeShares> type_shares;
  std::vector<ComplianceProfile> profiles;
  OutcomeModel outcome;
  // Direct effect of the instrument for noncompliers (units whose D(z)
  // does not vary): Y(z_k, d) gains H_u * k, H_u ~ N(direct_effect,
  // direct_effect_sd).
  double direct_effect = 0.0;
  double direct_effect_sd = 0.0;
  // At most one covariate; x_effect holds one effect shift per label.
  CovariateSchema covariates;
  std::vector<double> x_effect;
  // Linear effects Y(d) = a + Delta d with a and Delta uncorrelated with
  // treatment; tags the population with "AS" and "L".
  bool additive_linear = false;
  std::uint64_t seed = 0;
};

std::vector<ComplianceProfile> profiles_from_types(const TypeShares& shares);

// Builds the population; shares become exact unit weights. Deterministic in
// the config (including the seed).
Population make_scenario(const ScenarioConfig& config);

}  // namespace late
