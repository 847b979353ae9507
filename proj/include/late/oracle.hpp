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

#include "late/curves.hpp"
#include "late/instrument.hpp"
#include "late/population.hpp"

// Ground truth computed from full counterfactual tables by enumeration
// (and grid integration for continuous doses). Every function here reads
// potential outcomes; none of them looks at an ObservedSample.
namespace late::oracle {

enum class BasicParameter { kAte, kAtt, kItt, kComplierShare, kComplierShareOfTreated };

const char* to_string(BasicParameter p);

// A causal parameter that the identification results express as a weighted
// combination. `support` labels the weights: treatment levels for ACR,
// upper instrument values of adjacent pairs for IV combinations, grid cell
// midpoints for marginal responses.
struct WeightedParameter {
  std::string kind;
  double value = 0.0;
  std::vector<double> weights;
  std::vector<double> components;
  std::vector<double> support;
  // Mass of switchers crossing more than one treatment level (ACR only).
  double overlap_mass = 0.0;
  // Grid spacing for marginal responses; weights integrate to one with it.
  double cell_width = 0.0;
  std::vector<std::string> preconditions_checked;
};

// E[Y(1) - Y(0) | D(z) != D(w)] for a binary treatment.
double true_late(const Population& pop, double z, double w);

double true_basic(const Population& pop, BasicParameter kind);

// Average causal response between instrument values w < z (ranked by mean
// treatment): sum_j omega_j E[Y(j) - Y(j-1) | D(z) >= j > D(w)].
WeightedParameter true_acr(const Population& pop, double z, double w);

// Convex combination of adjacent-pair effects reproduced by the
// Cov(Y, g(Z)) / Cov(D, g(Z)) estimand. Pair effects are LATEs for binary
// treatments, ACRs for discrete doses and marginal responses for
// continuous doses. Instrument values are ranked by E[D | Z]; ties merge.
WeightedParameter true_iv_combination(const Population& pop, const InstrumentFunction& g);

struct CovariateCombination {
  double value = 0.0;
  std::vector<std::vector<int>> cells;
  std::vector<double> cell_mass;
  // Variance of E[D | Z, X] within each covariate cell.
  std::vector<double> theta;
  // Per-cell combination; NaN where theta is zero.
  std::vector<double> cell_value;
  std::vector<std::string> preconditions_checked;
};

// Theta-weighted average of the per-cell propensity-instrumented combination.
CovariateCombination true_acr_with_covariates(const Population& pop);

// Average marginal causal response for continuous doses. Weights are cell
// averages of omega(d) over the pooled grid; `grid_size` 0 uses the
// population's setting.
WeightedParameter true_amcr(const Population& pop, double z, double w, int grid_size = 0);

// Distribution of Y(arm) among compliers (binary instrument and treatment).
StepCurve true_complier_outcome(const Population& pop, int arm);

// Difference of complier tau-quantiles of Y(1) and Y(0).
double true_qte(const Population& pop, double tau);

// E[g(Y, D, X) | complier] with Y, D the realized values.
double true_complier_mean(const Population& pop, const RowFunction& g);

enum class EstimandForm { kWald, kIvG, kTslsSaturated, kTslsSaturatedX, kOls };

const char* to_string(EstimandForm form);

// Population value of an observable estimand, computed from the exact cell
// law. Shares no code with the combinations above.
double population_estimand(const Population& pop, EstimandForm form,
                           const InstrumentFunction& g = InstrumentFunction::identity());

}  // namespace late::oracle
