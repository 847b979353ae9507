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

#include <cstdint>
#include <string>
#include <vector>

#include "late/scenario.hpp"

// Seeded scenario families used by the property suites, the sensitivity
// sweeps and `late simulate --scenario`.
namespace late::battery {

// Binary treatment, instrument values 0..K-1, threshold compliance types
// D(z_k) = 1{k >= t}. Satisfies exclusion and monotonicity.
ScenarioConfig binary_multi_z(std::uint64_t seed, int K);

// Treatment levels 0..J, instrument values 0..K-1, nondecreasing response
// profiles. `x_cells` > 1 adds a covariate whose distribution differs by
// profile.
ScenarioConfig multi_level(std::uint64_t seed, int K, int J, int x_cells = 1);

// Binary instrument and treatment with defiers; P(C) > P(D) > 0.
ScenarioConfig defier_mix(std::uint64_t seed);

// Binary instrument and treatment with a given defier share. Shares up to
// 0.5 use C = 0.5, NT = AT = (0.5 - s) / 2; larger shares use C = (1 - s) / 2.
// Defier effects are shifted up by 2.
ScenarioConfig defier_share(double share, std::uint64_t seed);

// Monotone binary scenario whose noncompliers carry a direct effect H.
ScenarioConfig direct_effect(std::uint64_t seed, double h_mean = 1.0, double h_sd = 0.5);

// Continuous doses on [0, 2]. `smooth` adds curvature, a cubic and a sine
// term; otherwise every unit has Y(d) = a + slope d.
ScenarioConfig continuous(std::uint64_t seed, int K, bool smooth, double slope = 1.5);

// Linear effects without selection on a multi-level treatment.
ScenarioConfig additive_linear(std::uint64_t seed, int K = 3, int J = 3);

// Scenario by name for the CLI: binary, multi_z, multi_level, covariates,
// defiers, direct_effect, continuous, smooth, additive_linear.
ScenarioConfig by_name(const std::string& name, std::uint64_t seed);
std::vector<std::string> names();

}  // namespace late::battery
