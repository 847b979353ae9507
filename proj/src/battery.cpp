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

#include "late/battery.hpp"

#include <algorithm>
#include <numeric>

#include "late/error.hpp"
#include "late/random.hpp"

namespace late::battery {

namespace {

// Positive probabilities bounded away from zero, summing to one.
std::vector<double> simplex(Rng& rng, std::size_t n, double floor = 0.2) {
  std::vector<double> p(n);
  for (double& v : p) v = rng.uniform(floor, 1.0);
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= s;
  // Absorb rounding so the sum is 1 to machine precision.
  p.back() = 1.0 - std::accumulate(p.begin(), p.end() - 1, 0.0);
  return p;
}

std::vector<double> index_support(int K) {
  std::vector<double> z(static_cast<std::size_t>(K));
  std::iota(z.begin(), z.end(), 0.0);
  return z;
}

}  // namespace

ScenarioConfig binary_multi_z(std::uint64_t seed, int K) {
  if (K < 2) fail(ErrorCode::kConfig, "need at least two instrument values");
  Rng rng(derive_seed(seed, 0xB1));
  ScenarioConfig cfg;
  cfg.id = "binary_multi_z";
  cfg.z_support = index_support(K);
  cfg.z_dist = simplex(rng, cfg.z_support.size());
  const auto shares = simplex(rng, static_cast<std::size_t>(K) + 1);
  for (int t = 0; t <= K; ++t) {
    ComplianceProfile p;
    p.label = "threshold" + std::to_string(t);
    for (int k = 0; k < K; ++k) p.d_of_z.push_back(k >= t ? 1.0 : 0.0);
    p.share = shares[static_cast<std::size_t>(t)];
    p.effect_shift = rng.uniform(-1.0, 2.0);
    cfg.profiles.push_back(std::move(p));
  }
  cfg.n_units = 30;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig multi_level(std::uint64_t seed, int K, int J, int x_cells) {
  if (K < 2 || J < 1 || x_cells < 1) fail(ErrorCode::kConfig, "invalid battery dimensions");
  Rng rng(derive_seed(seed, 0xB2));
  ScenarioConfig cfg;
  cfg.id = "multi_level";
  cfg.z_support = index_support(K);
  cfg.z_dist = simplex(rng, cfg.z_support.size());
  cfg.d_support = TreatmentSupport::discrete(J);
  if (x_cells > 1) {
    cfg.covariates.names = {"x"};
    cfg.covariates.labels.emplace_back();
    for (int c = 0; c < x_cells; ++c) cfg.covariates.labels[0].push_back("c" + std::to_string(c));
    for (int c = 0; c < x_cells; ++c) cfg.x_effect.push_back(rng.uniform(-0.5, 0.5));
  }
  const auto n_profiles = static_cast<std::size_t>(4 + rng.below(5));
  const auto shares = simplex(rng, n_profiles, 0.1);
  for (std::size_t i = 0; i < n_profiles; ++i) {
    ComplianceProfile p;
    p.label = "profile" + std::to_string(i);
    if (i == 0) {
      // Spans the full range so every covariate cell has a first stage.
      for (int k = 0; k < K; ++k) p.d_of_z.push_back(k == 0 ? 0.0 : static_cast<double>(J));
    } else {
      for (int k = 0; k < K; ++k) p.d_of_z.push_back(static_cast<double>(rng.below(J + 1)));
      std::sort(p.d_of_z.begin(), p.d_of_z.end());
    }
    p.share = shares[i];
    p.effect_shift = rng.uniform(-0.5, 1.0);
    if (x_cells > 1 && i > 0) p.x_probs = simplex(rng, static_cast<std::size_t>(x_cells), 0.05);
    cfg.profiles.push_back(std::move(p));
  }
  cfg.n_units = 24;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig defier_mix(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xB3));
  ScenarioConfig cfg;
  cfg.id = "defier_mix";
  const double c = rng.uniform(0.3, 0.5);
  const double d = rng.uniform(0.05, 0.25);
  const double at = rng.uniform(0.0, 1.0 - c - d);
  cfg.type_shares = TypeShares{1.0 - c - d - at, c, d, at};
  const double p1 = rng.uniform(0.3, 0.7);
  cfg.z_dist = {1.0 - p1, p1};
  cfg.outcome.effect_lo = rng.uniform(-1.0, 1.0);
  cfg.outcome.effect_hi = cfg.outcome.effect_lo + rng.uniform(0.5, 3.0);
  cfg.n_units = 40;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig defier_share(double s, std::uint64_t seed) {
  if (!(s >= 0.0 && s <= 1.0)) fail(ErrorCode::kConfig, "defier share must lie in [0, 1]");
  ScenarioConfig cfg;
  cfg.id = "defier_share";
  const TypeShares shares = s <= 0.5
                                ? TypeShares{(0.5 - s) / 2.0, 0.5, s, (0.5 - s) / 2.0}
                                : TypeShares{(1.0 - s) / 4.0, (1.0 - s) / 2.0, s, (1.0 - s) / 4.0};
  cfg.profiles = profiles_from_types(shares);
  // Defiers gain more from treatment than compliers, so the bias grows
  // visibly with the defier share.
  cfg.profiles[2].effect_shift = 2.0;
  cfg.n_units = 40;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig direct_effect(std::uint64_t seed, double h_mean, double h_sd) {
  Rng rng(derive_seed(seed, 0xB4));
  ScenarioConfig cfg;
  cfg.id = "direct_effect";
  const double c = rng.uniform(0.2, 0.6);
  const double at = rng.uniform(0.05, 1.0 - c - 0.05);
  cfg.type_shares = TypeShares{1.0 - c - at, c, 0.0, at};
  const double p1 = rng.uniform(0.3, 0.7);
  cfg.z_dist = {1.0 - p1, p1};
  cfg.direct_effect = h_mean;
  cfg.direct_effect_sd = h_sd;
  cfg.n_units = 40;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig continuous(std::uint64_t seed, int K, bool smooth, double slope) {
  if (K < 2) fail(ErrorCode::kConfig, "need at least two instrument values");
  Rng rng(derive_seed(seed, 0xB5));
  ScenarioConfig cfg;
  cfg.id = smooth ? "smooth" : "continuous";
  cfg.z_support = index_support(K);
  cfg.z_dist = simplex(rng, cfg.z_support.size());
  cfg.d_support = TreatmentSupport::continuous(0.0, 2.0);
  const auto n_profiles = static_cast<std::size_t>(3 + rng.below(3));
  const auto shares = simplex(rng, n_profiles, 0.2);
  for (std::size_t i = 0; i < n_profiles; ++i) {
    ComplianceProfile p;
    p.label = "profile" + std::to_string(i);
    for (int k = 0; k < K; ++k) p.d_of_z.push_back(rng.uniform(0.1, 1.9));
    std::sort(p.d_of_z.begin(), p.d_of_z.end());
    if (i == 0) {
      p.d_of_z.front() = 0.1;
      p.d_of_z.back() = 1.9;
    }
    p.share = shares[i];
    cfg.profiles.push_back(std::move(p));
  }
  cfg.outcome.dose_jitter = 0.1;
  if (smooth) {
    cfg.outcome.effect_lo = 0.5;
    cfg.outcome.effect_hi = 2.0;
    cfg.outcome.curvature = 0.8;
    cfg.outcome.cubic = 0.3;
    cfg.outcome.sine_amplitude = 0.4;
    cfg.outcome.sine_frequency = 2.5;
  } else {
    cfg.outcome.effect_lo = slope;
    cfg.outcome.effect_hi = slope;
  }
  cfg.n_units = 20;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig additive_linear(std::uint64_t seed, int K, int J) {
  ScenarioConfig cfg = multi_level(seed, K, J, 1);
  cfg.id = "additive_linear";
  cfg.additive_linear = true;
  cfg.outcome.effect_lo = -0.5;
  cfg.outcome.effect_hi = 2.0;
  return cfg;
}

std::vector<std::string> names() {
  return {"binary",     "multi_z",   "multi_level", "covariates",     "defiers",
          "direct_effect", "continuous", "smooth",   "additive_linear"};
}

ScenarioConfig by_name(const std::string& name, std::uint64_t seed) {
  if (name == "binary") {
    ScenarioConfig cfg;
    cfg.id = "binary";
    cfg.type_shares = TypeShares{0.25, 0.5, 0.0, 0.25};
    cfg.seed = seed;
    return cfg;
  }
  if (name == "multi_z") return binary_multi_z(seed, 3);
  if (name == "multi_level") return multi_level(seed, 3, 2, 1);
  if (name == "covariates") return multi_level(seed, 3, 2, 3);
  if (name == "defiers") return defier_mix(seed);
  if (name == "direct_effect") return direct_effect(seed);
  if (name == "continuous") return continuous(seed, 3, false);
  if (name == "smooth") return continuous(seed, 3, true);
  if (name == "additive_linear") return additive_linear(seed);
  std::string known;
  for (const auto& n : names()) known += " " + n;
  fail(ErrorCode::kConfig, "unknown scenario '" + name + "'; known:" + known);
}

}  // namespace late::battery
