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

#include "late/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "format.hpp"
#include "late/error.hpp"
#include "late/estimators.hpp"
#include "late/oracle.hpp"

namespace late {

using detail::num;

CovariateSpecification CovariateSpecification::parse(const std::string& text) {
  CovariateSpecification spec;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "cells") {
    spec.form = Form::kCellIndicators;
  } else if (head == "linear") {
    spec.form = Form::kLinear;
  } else if (head == "none") {
    spec.form = Form::kNone;
  } else {
    fail(ErrorCode::kInvalidArgument,
         "unknown covariate specification '" + text + "' (cells, linear, none)");
  }
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (!name.empty()) spec.covariates.push_back(name);
    }
  }
  return spec;
}

std::string CovariateSpecification::describe() const {
  std::string out = form == Form::kCellIndicators ? "cells" : form == Form::kLinear ? "linear" : "none";
  for (std::size_t i = 0; i < covariates.size(); ++i) out += (i == 0 ? ":" : ",") + covariates[i];
  return out;
}

SaturationVerdict saturation_check(const ObservedSample& s, const CovariateSpecification& spec) {
  SaturationVerdict v;
  const auto& schema = s.schema().covariates;
  for (const auto& name : spec.covariates) {
    if (std::find(schema.names.begin(), schema.names.end(), name) == schema.names.end()) {
      v.pass = false;
      v.verdict = "refused";
      v.reason = "covariate '" + name + "' is not in the sample";
      v.flags.push_back("unknown_covariate");
      return v;
    }
  }
  if (s.x_cells().size() <= 1) {
    v.verdict = "trivially_saturated";
    v.reason = "covariates take a single value in the sample";
    return v;
  }
  const bool all = spec.covariates.empty() || spec.covariates.size() == schema.size();
  if (spec.form == CovariateSpecification::Form::kCellIndicators && all) {
    v.verdict = "saturated";
    v.reason = "one indicator per observed covariate cell";
    return v;
  }
  v.pass = false;
  v.verdict = "refused";
  v.flags.push_back("non_saturated_covariates");
  switch (spec.form) {
    case CovariateSpecification::Form::kLinear:
      v.reason = "covariates entered linearly; the TSLS coefficient is then not a convex "
                 "combination of covariate-specific complier effects";
      break;
    case CovariateSpecification::Form::kNone:
      v.reason = "covariates vary but are left out of the specification";
      break;
    case CovariateSpecification::Form::kCellIndicators:
      v.reason = "indicators cover only a subset of the covariates";
      break;
  }
  return v;
}

MonotonicityResult monotonicity_check(const ObservedSample& s, double epsilon) {
  const AcrWeights w = acr_weights_hat(s);
  MonotonicityResult r;
  r.differences = w.raw;
  r.epsilon.assign(w.raw.size(), epsilon);
  for (std::size_t j = 0; j < w.raw.size(); ++j) {
    if (w.raw[j] < -r.epsilon[j]) r.crossing_levels.push_back(static_cast<int>(j + 1));
  }
  r.consistent = r.crossing_levels.empty();
  if (r.consistent) {
    r.verdict = "consistent";
  } else {
    r.verdict = "crossing detected at levels";
    for (int j : r.crossing_levels) r.verdict += " " + std::to_string(j);
  }
  return r;
}

MonotonicityResult monotonicity_check_bootstrap(const ObservedSample& s, std::uint64_t seed,
                                                std::size_t B, double level) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::kInvalidArgument, "level must lie in (0, 1)");
  const std::vector<double> base = acr_weights_hat(s).raw;
  const BootstrapDraws draws = bootstrap_draws(
      s, [](const ObservedSample& r) { return acr_weights_hat(r).raw; }, B, seed);
  if (static_cast<double>(draws.failed) > 0.2 * static_cast<double>(B)) {
    fail(ErrorCode::kInference, "too many bootstrap replicates failed for the monotonicity band");
  }
  std::vector<double> eps(base.size());
  for (std::size_t j = 0; j < base.size(); ++j) {
    std::vector<double> dev;
    for (const auto& d : draws.values) {
      if (!d.empty()) dev.push_back(base[j] - d[j]);
    }
    eps[j] = std::max(0.0, quantile_type7(dev, level));
  }
  MonotonicityResult r = monotonicity_check(s, 0.0);
  r.epsilon = eps;
  r.crossing_levels.clear();
  for (std::size_t j = 0; j < base.size(); ++j) {
    if (base[j] < -eps[j]) r.crossing_levels.push_back(static_cast<int>(j + 1));
  }
  r.consistent = r.crossing_levels.empty();
  r.verdict = r.consistent ? "consistent" : "crossing detected at levels";
  for (int j : r.crossing_levels) r.verdict += " " + std::to_string(j);
  return r;
}

RelevanceResult relevance_check(const ObservedSample& s, double threshold) {
  EstimatorOptions opt;
  opt.weak_threshold = threshold;
  RelevanceResult r;
  // wald() applies the zero and weak thresholds to the first stage.
  const EstimateReport w = wald(s, opt);
  r.first_stage = *w.first_stage;
  r.flags = w.flags;
  r.pass = std::find(r.flags.begin(), r.flags.end(), "weak_instrument") == r.flags.end();
  return r;
}

namespace {

void require_binary(const Population& pop, const char* what) {
  if (!pop.d_support().is_binary() || pop.num_z() != 2) {
    fail(ErrorCode::kUnsupportedScenario,
         std::string(what) + " needs a binary instrument and a binary treatment");
  }
}

bool close_to(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)); }

}  // namespace

SensitivityReport exclusion_sensitivity(const Population& pop, std::string scenario_id) {
  require_binary(pop, "exclusion sensitivity");
  double p_c = 0.0, p_nc = 0.0, h_sum = 0.0;
  for (const auto& u : pop.units()) {
    const double m = pop.mass(u);
    if (m <= 0.0) continue;
    const double d0 = u.d_of_z[0], d1 = u.d_of_z[1];
    if (d1 < d0) {
      fail(ErrorCode::kUnsupportedScenario,
           "unit '" + u.id + "' is a defier; exclusion sensitivity assumes monotonicity");
    }
    if (d1 > d0) {
      if (!pop.unit_satisfies_exclusion(u)) {
        fail(ErrorCode::kUnsupportedScenario,
             "complier '" + u.id + "' has a direct instrument effect; only noncompliers may");
      }
      p_c += m;
    } else {
      p_nc += m;
      h_sum += m * (pop.outcome(u, 1, d0) - pop.outcome(u, 0, d0));
    }
  }
  SensitivityReport r;
  r.scenario_id = std::move(scenario_id);
  r.true_late = oracle::true_late(pop, pop.z_support()[1], pop.z_support()[0]);
  r.biased_estimand = oracle::population_estimand(pop, oracle::EstimandForm::kWald);
  r.bias = r.biased_estimand - r.true_late;
  const double mean_h = p_nc > 0.0 ? h_sum / p_nc : 0.0;
  const double odds = p_nc / p_c;
  r.drivers = {{"mean_direct_effect_noncompliers", mean_h},
               {"odds_noncompliance", odds},
               {"complier_share", p_c}};
  r.identity_residual = r.bias - mean_h * odds;
  r.identity_holds = close_to(r.bias, mean_h * odds);
  r.sign_reversed = false;
  return r;
}

SensitivityReport defier_sensitivity(const Population& pop, std::string scenario_id) {
  require_binary(pop, "defier sensitivity");
  if (!pop.exclusion_holds()) {
    fail(ErrorCode::kUnsupportedScenario, "defier sensitivity assumes the exclusion restriction");
  }
  double p_c = 0.0, p_d = 0.0, s_c = 0.0, s_d = 0.0;
  for (const auto& u : pop.units()) {
    const double m = pop.mass(u);
    if (m <= 0.0) continue;
    const double d0 = u.d_of_z[0], d1 = u.d_of_z[1];
    if (d1 > d0) {
      p_c += m;
      s_c += m * pop.level_effect(u, 1);
    } else if (d1 < d0) {
      p_d += m;
      s_d += m * pop.level_effect(u, 1);
    }
  }
  if (std::abs(p_c - p_d) <= kZeroTolerance) {
    fail(ErrorCode::kWeakInstrument,
         "complier and defier shares are equal; the first stage is zero");
  }
  const double lambda = p_d / (p_c - p_d);
  const double delta_c = p_c > 0.0 ? s_c / p_c : 0.0;
  const double delta_d = p_d > 0.0 ? s_d / p_d : 0.0;
  const double combined = (1.0 + lambda) * delta_c - lambda * delta_d;

  SensitivityReport r;
  r.scenario_id = std::move(scenario_id);
  r.true_late = delta_c;
  r.biased_estimand = oracle::population_estimand(pop, oracle::EstimandForm::kWald);
  r.bias = r.biased_estimand - r.true_late;
  r.drivers = {{"lambda", lambda},
               {"delta_c", delta_c},
               {"delta_d", delta_d},
               {"complier_share", p_c},
               {"defier_share", p_d}};
  r.identity_residual = r.biased_estimand - combined;
  r.identity_holds = close_to(r.biased_estimand, combined);
  const bool both_positive = delta_c > 0.0 && delta_d > 0.0;
  const bool both_negative = delta_c < 0.0 && delta_d < 0.0;
  r.sign_reversed = (both_positive && r.biased_estimand < 0.0) ||
                    (both_negative && r.biased_estimand > 0.0);
  return r;
}

OlsDecomposition ols_decomposition(const Population& pop) {
  if (!pop.d_support().is_binary()) {
    fail(ErrorCode::kUnsupportedScenario, "OLS decomposition needs a binary treatment");
  }
  double m1 = 0.0, m0 = 0.0, y0_1 = 0.0, y0_0 = 0.0;
  for (const auto& u : pop.units()) {
    for (std::size_t k = 0; k < pop.num_z(); ++k) {
      const double m = pop.mass(u) * pop.z_dist()[k];
      if (!(m > 0.0)) continue;
      const double y0 = pop.outcome(u, k, 0.0);
      if (u.d_of_z[k] == 1.0) {
        m1 += m;
        y0_1 += m * y0;
      } else {
        m0 += m;
        y0_0 += m * y0;
      }
    }
  }
  if (!(m1 > 0.0 && m0 > 0.0)) {
    fail(ErrorCode::kConditioning, "one treatment arm has zero mass");
  }
  OlsDecomposition r;
  r.beta_d = oracle::population_estimand(pop, oracle::EstimandForm::kOls);
  r.att = oracle::true_basic(pop, oracle::BasicParameter::kAtt);
  r.selection_bias = y0_1 / m1 - y0_0 / m0;
  r.residual = r.beta_d - (r.att + r.selection_bias);
  return r;
}

WeightedEffect ols_weighted_effect(const Population& pop) {
  if (!pop.has_assumption("AS") || !pop.has_assumption("L")) {
    fail(ErrorCode::kUnsupportedScenario,
         "weighted-effect identity needs a scenario built with no selection (AS) and linear "
         "effects (L)");
  }
  double mu = 0.0;
  for (const auto& u : pop.units()) {
    for (std::size_t k = 0; k < pop.num_z(); ++k) mu += pop.mass(u) * pop.z_dist()[k] * u.d_of_z[k];
  }
  double var = 0.0;
  for (const auto& u : pop.units()) {
    for (std::size_t k = 0; k < pop.num_z(); ++k) {
      const double dev = u.d_of_z[k] - mu;
      var += pop.mass(u) * pop.z_dist()[k] * dev * dev;
    }
  }
  if (!(var > kZeroTolerance)) fail(ErrorCode::kConditioning, "treatment does not vary");
  WeightedEffect r;
  r.min_w = std::numeric_limits<double>::infinity();
  r.max_w = -r.min_w;
  for (const auto& u : pop.units()) {
    const double delta = pop.averaged_outcome(u, 1.0) - pop.averaged_outcome(u, 0.0);
    for (std::size_t k = 0; k < pop.num_z(); ++k) {
      const double m = pop.mass(u) * pop.z_dist()[k];
      if (!(m > 0.0)) continue;
      const double dev = u.d_of_z[k] - mu;
      const double w = dev * dev / var;
      r.mean_w += m * w;
      r.weighted_effect += m * w * delta;
      r.min_w = std::min(r.min_w, w);
      r.max_w = std::max(r.max_w, w);
    }
  }
  r.beta_d = oracle::population_estimand(pop, oracle::EstimandForm::kOls);
  r.residual = r.beta_d - r.weighted_effect;
  return r;
}

MisparameterizationRecord misparameterization_experiment(const Population& pop, int threshold) {
  if (!pop.d_support().is_discrete() || pop.num_z() != 2) {
    fail(ErrorCode::kUnsupportedScenario,
         "misparameterization needs a discrete treatment and a binary instrument");
  }
  if (threshold < 1 || threshold > pop.d_support().max_level) {
    fail(ErrorCode::kInvalidArgument, "threshold must lie in 1.." +
                                          std::to_string(pop.d_support().max_level));
  }
  double mass[2] = {0.0, 0.0}, sy[2] = {0.0, 0.0}, sd[2] = {0.0, 0.0};
  for (const auto& u : pop.units()) {
    for (std::size_t k = 0; k < 2; ++k) {
      const double m = pop.mass(u) * pop.z_dist()[k];
      if (!(m > 0.0)) continue;
      mass[k] += m;
      sy[k] += m * pop.realized_outcome(u, k);
      sd[k] += m * (u.d_of_z[k] >= threshold ? 1.0 : 0.0);
    }
  }
  if (!(mass[0] > 0.0 && mass[1] > 0.0)) {
    fail(ErrorCode::kConditioning, "an instrument arm has zero probability");
  }
  const double fs = sd[1] / mass[1] - sd[0] / mass[0];
  if (!(std::abs(fs) > kZeroTolerance)) {
    fail(ErrorCode::kWeakInstrument,
         "recoded first stage is zero at threshold " + std::to_string(threshold));
  }
  MisparameterizationRecord r;
  r.threshold = threshold;
  r.recoded_wald = (sy[1] / mass[1] - sy[0] / mass[0]) / fs;
  r.acr = oracle::true_acr(pop, pop.z_support()[1], pop.z_support()[0]).value;
  r.ratio = r.recoded_wald / r.acr;
  r.sign_agrees = (r.recoded_wald > 0.0) == (r.acr > 0.0) && (r.recoded_wald < 0.0) == (r.acr < 0.0);
  return r;
}

}  // namespace late
