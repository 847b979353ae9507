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

#include "late/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "format.hpp"
#include "late/error.hpp"
#include "late/random.hpp"

namespace late {

using detail::num;

namespace {

void config_error(const std::string& what) { fail(ErrorCode::kConfig, what); }

void check_shares(const std::vector<ComplianceProfile>& profiles, std::size_t K,
                  std::size_t num_labels) {
  if (profiles.empty()) config_error("scenario has no compliance profiles");
  double total = 0.0;
  for (const auto& p : profiles) {
    if (!(p.share >= 0.0 && p.share <= 1.0)) {
      config_error("share of profile '" + p.label + "' must lie in [0, 1]");
    }
    if (p.d_of_z.size() != K) {
      config_error("profile '" + p.label + "' needs one treatment value per instrument value");
    }
    if (!p.x_probs.empty()) {
      if (p.x_probs.size() != num_labels) {
        config_error("profile '" + p.label + "' covariate distribution has the wrong length");
      }
      double s = 0.0;
      for (double q : p.x_probs) {
        if (!(q >= 0.0 && q <= 1.0)) config_error("covariate probabilities must lie in [0, 1]");
        s += q;
      }
      if (std::abs(s - 1.0) > 1e-9) {
        config_error("covariate distribution of profile '" + p.label + "' sums to " + num(s));
      }
    }
    total += p.share;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    config_error("compliance shares sum to " + num(total) + ", not 1");
  }
}

bool is_noncomplier(const std::vector<double>& d_of_z) {
  return std::all_of(d_of_z.begin(), d_of_z.end(), [&](double d) { return d == d_of_z.front(); });
}

// Removes the mass-weighted linear dependence of `v` on the unit's mean
// treatment so that Cov(v, D) = 0 in the cell law.
void decorrelate(std::vector<double>& v, const std::vector<double>& mass,
                 const std::vector<double>& mean_d) {
  double mu = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) mu += mass[i] * mean_d[i];
  double sxx = 0.0, sxv = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sxx += mass[i] * (mean_d[i] - mu) * (mean_d[i] - mu);
    sxv += mass[i] * (mean_d[i] - mu) * v[i];
  }
  if (sxx <= 0.0) return;
  const double beta = sxv / sxx;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= beta * (mean_d[i] - mu);
}

}  // namespace

std::vector<ComplianceProfile> profiles_from_types(const TypeShares& s) {
  return {
      {"never_taker", {0.0, 0.0}, s.never_taker, {}, 0.0},
      {"complier", {0.0, 1.0}, s.complier, {}, 0.0},
      {"defier", {1.0, 0.0}, s.defier, {}, 0.0},
      {"always_taker", {1.0, 1.0}, s.always_taker, {}, 0.0},
  };
}

Population make_scenario(const ScenarioConfig& cfg) {
  const std::size_t K = cfg.z_support.size();
  if (cfg.covariates.size() > 1) config_error("scenarios support at most one covariate");
  const std::size_t num_labels = cfg.covariates.empty() ? 1 : cfg.covariates.labels[0].size();
  if (!cfg.covariates.empty() && num_labels == 0) config_error("covariate has no labels");
  if (!cfg.x_effect.empty() && cfg.x_effect.size() != num_labels) {
    config_error("x_effect needs one entry per covariate label");
  }
  if (cfg.n_units == 0) config_error("n_units must be positive");
  if (cfg.additive_linear && (cfg.direct_effect != 0.0 || cfg.direct_effect_sd != 0.0)) {
    config_error("additive-linear scenarios cannot carry a direct instrument effect");
  }
  const auto& om = cfg.outcome;
  if (!(om.effect_lo <= om.effect_hi)) config_error("effect_lo must not exceed effect_hi");
  if (!(om.baseline_sd >= 0.0) || !(cfg.direct_effect_sd >= 0.0)) {
    config_error("standard deviations must be nonnegative");
  }

  std::vector<ComplianceProfile> profiles;
  if (cfg.type_shares) {
    if (!cfg.profiles.empty()) config_error("give either type_shares or profiles, not both");
    if (K != 2 || !cfg.d_support.is_binary()) {
      config_error("type_shares need a binary instrument and treatment");
    }
    profiles = profiles_from_types(*cfg.type_shares);
  } else {
    profiles = cfg.profiles;
  }
  check_shares(profiles, K, num_labels);

  Rng rng(cfg.seed);
  const bool continuous = cfg.d_support.is_continuous();
  const bool shifted = cfg.direct_effect != 0.0 || cfg.direct_effect_sd != 0.0;

  std::vector<PotentialUnit> units;
  std::vector<double> base, slope;  // additive-linear components
  for (const auto& p : profiles) {
    for (std::size_t l = 0; l < num_labels; ++l) {
      const double xp = p.x_probs.empty() ? 1.0 / static_cast<double>(num_labels) : p.x_probs[l];
      const double mass = p.share * xp;
      if (mass <= 0.0) continue;
      const auto count = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(mass * static_cast<double>(cfg.n_units))));
      const double shift = p.effect_shift + (cfg.x_effect.empty() ? 0.0 : cfg.x_effect[l]);
      for (std::size_t i = 0; i < count; ++i) {
        PotentialUnit u;
        u.id = p.label + (cfg.covariates.empty() ? "" : "/" + cfg.covariates.labels[0][l]) +
               "#" + std::to_string(i);
        u.weight = mass / static_cast<double>(count);
        u.d_of_z = p.d_of_z;
        if (!cfg.covariates.empty()) u.x = {static_cast<int>(l)};
        if (continuous && om.dose_jitter > 0.0) {
          const double jitter = rng.uniform(-om.dose_jitter, om.dose_jitter);
          for (double& d : u.d_of_z) {
            d = std::clamp(d + jitter, cfg.d_support.lo, cfg.d_support.hi);
          }
        }
        const double a = rng.normal(om.baseline_mean, om.baseline_sd);
        const double h = is_noncomplier(u.d_of_z) && shifted
                             ? rng.normal(cfg.direct_effect, cfg.direct_effect_sd)
                             : 0.0;
        if (cfg.additive_linear) {
          base.push_back(a);
          slope.push_back(rng.uniform(om.effect_lo, om.effect_hi) + shift);
        } else if (continuous) {
          OutcomeCurve c;
          const double b = rng.uniform(om.effect_lo, om.effect_hi) + shift;
          const double q = om.curvature > 0.0 ? rng.uniform(0.0, om.curvature) : 0.0;
          c.poly = {a, b, q, om.cubic};
          c.sine_amplitude = om.sine_amplitude;
          c.sine_frequency = om.sine_frequency;
          for (std::size_t k = 0; k < K; ++k) {
            OutcomeCurve ck = c;
            ck.poly[0] += h * static_cast<double>(k);
            u.y_curve.push_back(ck);
          }
        } else {
          std::vector<double> row(cfg.d_support.num_levels());
          row[0] = a;
          for (std::size_t j = 1; j < row.size(); ++j) {
            row[j] = row[j - 1] + rng.uniform(om.effect_lo, om.effect_hi) + shift;
          }
          for (std::size_t k = 0; k < K; ++k) {
            auto rk = row;
            for (double& y : rk) y += h * static_cast<double>(k);
            u.y_of_zd.push_back(std::move(rk));
          }
        }
        units.push_back(std::move(u));
      }
    }
  }

  std::vector<std::string> tags;
  if (cfg.additive_linear) {
    double total = 0.0;
    for (const auto& u : units) total += u.weight;
    std::vector<double> mass, mean_d;
    for (const auto& u : units) {
      mass.push_back(u.weight / total);
      double m = 0.0;
      for (std::size_t k = 0; k < K; ++k) m += cfg.z_dist[k] * u.d_of_z[k];
      mean_d.push_back(m);
    }
    decorrelate(base, mass, mean_d);
    decorrelate(slope, mass, mean_d);
    for (std::size_t i = 0; i < units.size(); ++i) {
      auto& u = units[i];
      if (continuous) {
        OutcomeCurve c;
        c.poly = {base[i], slope[i]};
        u.y_curve.assign(K, c);
      } else {
        std::vector<double> row(cfg.d_support.num_levels());
        for (std::size_t j = 0; j < row.size(); ++j) {
          row[j] = base[i] + slope[i] * static_cast<double>(j);
        }
        u.y_of_zd.assign(K, row);
      }
    }
    tags = {"AS", "L"};
  }

  return Population(cfg.z_support, cfg.d_support, cfg.z_dist, std::move(units), !shifted,
                    cfg.covariates, std::move(tags));
}

}  // namespace late
