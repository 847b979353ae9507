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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "late/covariate_spec.hpp"
#include "late/instrument.hpp"
#include "late/sample.hpp"

namespace late {

struct EstimateReport {
  std::string kind;
  double point = 0.0;
  std::optional<double> first_stage;
  std::vector<double> weights_hat;
  std::optional<double> se;
  std::optional<std::array<double, 2>> ci;
  std::size_t n = 0;
  std::vector<std::string> flags;
  std::vector<std::string> dropped_cells;
  std::size_t replicates = 0;
  std::size_t failed_replicates = 0;
};

struct EstimatorOptions {
  // First stages below this magnitude are flagged "weak_instrument"; below
  // kZeroTolerance they are an error.
  double weak_threshold = 0.01;
  InstrumentFunction g = InstrumentFunction::identity();
  CovariateSpecification covariates;
};

enum class Estimator { kWald, kIvG, kTsls, kTslsX, kItt, kOls };

const char* to_string(Estimator e);
Estimator parse_estimator(const std::string& name);

// (E[Y|Z=1] - E[Y|Z=0]) / (E[D|Z=1] - E[D|Z=0]) for a binary instrument
// (the upper support value plays Z = 1).
EstimateReport wald(const ObservedSample& s, const EstimatorOptions& opt = {});

// Cov(Y, g(Z)) / Cov(D, g(Z)).
EstimateReport iv_g(const ObservedSample& s, const EstimatorOptions& opt = {});

// Second stage on the instrument-cell means of D.
EstimateReport tsls_saturated(const ObservedSample& s, const EstimatorOptions& opt = {});

// First stage on (Z, X)-cell means, second stage with covariate-cell
// indicators. Any other covariate specification is refused.
EstimateReport tsls_saturated_x(const ObservedSample& s, const EstimatorOptions& opt = {});

EstimateReport itt_hat(const ObservedSample& s, const EstimatorOptions& opt = {});
EstimateReport ols_slope(const ObservedSample& s, const EstimatorOptions& opt = {});

EstimateReport estimate(const ObservedSample& s, Estimator e, const EstimatorOptions& opt = {});

struct AcrWeights {
  // P(D >= j | Z = 1) - P(D >= j | Z = 0), j = 1..J.
  std::vector<double> raw;
  // raw / sum(raw); nonnegative unless "cdf_crossing" is flagged.
  std::vector<double> normalized;
  std::vector<std::string> flags;
};

AcrWeights acr_weights_hat(const ObservedSample& s);

enum class Execution { kSerial, kParallel };

// Nonparametric row resampling with per-replicate seeds derived from
// `seed`. Results do not depend on scheduling.
struct BootstrapDraws {
  // One entry per replicate; empty where the statistic failed.
  std::vector<std::vector<double>> values;
  std::size_t failed = 0;
};

using VectorStatistic = std::function<std::vector<double>(const ObservedSample&)>;

BootstrapDraws bootstrap_draws(const ObservedSample& s, const VectorStatistic& stat,
                               std::size_t B, std::uint64_t seed,
                               Execution exec = Execution::kParallel);

struct BootstrapResult {
  double se = 0.0;
  std::array<double, 2> ci{0.0, 0.0};
  std::size_t replicates = 0;
  std::size_t failed = 0;
};

// Standard deviation (n - 1 divisor) and 95% percentile interval of the
// successful replicates. Needs B >= 100; more than 20% failures is an
// inference error.
BootstrapResult bootstrap(const ObservedSample& s, Estimator e, std::size_t B,
                          std::uint64_t seed, const EstimatorOptions& opt = {},
                          Execution exec = Execution::kParallel);

// Same as above for an arbitrary scalar statistic.
BootstrapResult bootstrap_statistic(const ObservedSample& s,
                                    const std::function<double(const ObservedSample&)>& stat,
                                    std::size_t B, std::uint64_t seed,
                                    Execution exec = Execution::kParallel);

// Quantile with linear interpolation between order statistics (type 7).
double quantile_type7(std::vector<double> values, double p);

}  // namespace late
