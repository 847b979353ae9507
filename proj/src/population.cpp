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

#include "late/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "format.hpp"
#include "late/error.hpp"
#include "late/random.hpp"

namespace late {

using detail::num;

double OutcomeCurve::operator()(double d) const {
  double acc = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * d + *it;
  if (sine_amplitude != 0.0) acc += sine_amplitude * std::sin(sine_frequency * d);
  return acc;
}

namespace {

void invalid(const std::string& what) { fail(ErrorCode::kInvalidArgument, what); }

}  // namespace

Population::Population(std::vector<double> z_support, TreatmentSupport d_support,
                       std::vector<double> z_dist, std::vector<PotentialUnit> units,
                       bool exclusion_holds, CovariateSchema covariates,
                       std::vector<std::string> assumptions)
    : z_support_(std::move(z_support)),
      d_support_(d_support),
      z_dist_(std::move(z_dist)),
      units_(std::move(units)),
      exclusion_holds_(exclusion_holds),
      covariates_(std::move(covariates)),
      assumptions_(std::move(assumptions)) {
  const std::size_t K = z_support_.size();
  if (K == 0) invalid("instrument support is empty");
  for (std::size_t k = 0; k < K; ++k) {
    if (!std::isfinite(z_support_[k])) invalid("instrument support values must be finite");
    if (k > 0 && !(z_support_[k - 1] < z_support_[k])) {
      invalid("instrument support must be strictly increasing");
    }
  }
  if (z_dist_.size() != K) invalid("z_dist needs one probability per support point");
  double total_p = 0.0;
  for (double p : z_dist_) {
    if (!(p >= 0.0 && p <= 1.0)) invalid("z_dist probabilities must lie in [0, 1]");
    total_p += p;
  }
  if (std::abs(total_p - 1.0) > 1e-12) invalid("z_dist must sum to 1 (got " + num(total_p) + ")");
  if (covariates_.labels.size() != covariates_.names.size()) {
    invalid("covariate schema needs one label set per name");
  }
  if (units_.empty()) invalid("population has no units");

  const std::size_t p = covariates_.size();
  for (const auto& u : units_) {
    const std::string who = "unit '" + u.id + "': ";
    if (!std::isfinite(u.weight) || u.weight < 0.0) invalid(who + "weight must be finite and >= 0");
    total_weight_ += u.weight;
    if (u.d_of_z.size() != K) invalid(who + "d_of_z must cover the instrument support");
    for (double d : u.d_of_z) {
      if (!std::isfinite(d)) invalid(who + "treatment value is not finite");
      if (d_support_.is_discrete()) {
        if (d != std::floor(d) || d < 0 || d > d_support_.max_level) {
          invalid(who + "treatment value " + num(d) + " outside the discrete support");
        }
      } else if (d < d_support_.lo || d > d_support_.hi) {
        invalid(who + "treatment value " + num(d) + " outside the declared interval");
      }
    }
    if (d_support_.is_discrete()) {
      if (u.y_of_zd.size() != K || !u.y_curve.empty()) {
        invalid(who + "y_of_zd must have one row per instrument value");
      }
      for (const auto& row : u.y_of_zd) {
        if (row.size() != d_support_.num_levels()) {
          invalid(who + "y_of_zd rows must cover the treatment support");
        }
        for (double y : row) {
          if (!std::isfinite(y)) invalid(who + "outcome is not finite");
        }
      }
    } else {
      if (u.y_curve.size() != K || !u.y_of_zd.empty()) {
        invalid(who + "continuous treatment needs one outcome curve per instrument value");
      }
    }
    if (u.x.size() != p) invalid(who + "covariate vector does not match the schema");
    for (std::size_t k = 0; k < p; ++k) {
      if (u.x[k] < 0 || static_cast<std::size_t>(u.x[k]) >= covariates_.labels[k].size()) {
        invalid(who + "covariate '" + covariates_.names[k] + "' outside its label set");
      }
    }
    if (exclusion_holds_ && !unit_satisfies_exclusion(u)) {
      invalid(who + "outcome depends on the instrument but exclusion_holds is set");
    }
  }
  if (!(total_weight_ > 0.0)) invalid("total unit weight must be positive");
}

bool Population::has_assumption(const std::string& tag) const {
  return std::find(assumptions_.begin(), assumptions_.end(), tag) != assumptions_.end();
}

std::size_t Population::z_index(double z) const {
  auto it = std::lower_bound(z_support_.begin(), z_support_.end(), z);
  if (it == z_support_.end() || *it != z) {
    fail(ErrorCode::kInvalidArgument, "instrument value " + num(z) + " not in the support");
  }
  return static_cast<std::size_t>(it - z_support_.begin());
}

double Population::outcome(const PotentialUnit& u, std::size_t zk, double d) const {
  if (d_support_.is_discrete()) {
    return u.y_of_zd[zk].at(static_cast<std::size_t>(d));
  }
  return u.y_curve[zk](d);
}

double Population::averaged_outcome(const PotentialUnit& u, double d) const {
  // Exact when outcomes do not vary with z; a weighted sum can be off by an ulp.
  if (exclusion_holds_) return outcome(u, 0, d);
  double acc = 0.0;
  for (std::size_t k = 0; k < z_support_.size(); ++k) {
    if (z_dist_[k] > 0.0) acc += z_dist_[k] * outcome(u, k, d);
  }
  return acc;
}

double Population::level_effect(const PotentialUnit& u, int level) const {
  return averaged_outcome(u, level) - averaged_outcome(u, level - 1);
}

double Population::realized_outcome(const PotentialUnit& u, std::size_t zk) const {
  return outcome(u, zk, u.d_of_z[zk]);
}

bool Population::unit_satisfies_exclusion(const PotentialUnit& u) const {
  if (d_support_.is_discrete()) {
    for (std::size_t k = 1; k < u.y_of_zd.size(); ++k) {
      if (u.y_of_zd[k] != u.y_of_zd[0]) return false;
    }
  } else {
    for (std::size_t k = 1; k < u.y_curve.size(); ++k) {
      if (!(u.y_curve[k] == u.y_curve[0])) return false;
    }
  }
  return true;
}

SampleSchema Population::sample_schema() const {
  return SampleSchema{z_support_, d_support_, covariates_};
}

Population Population::with_units(std::vector<PotentialUnit> units, bool exclusion_holds) const {
  return Population(z_support_, d_support_, z_dist_, std::move(units), exclusion_holds,
                    covariates_, assumptions_);
}

const char* to_string(ComplianceType type) {
  switch (type) {
    case ComplianceType::kNeverTaker: return "never_taker";
    case ComplianceType::kComplier: return "complier";
    case ComplianceType::kDefier: return "defier";
    case ComplianceType::kAlwaysTaker: return "always_taker";
  }
  return "unknown";
}

ComplianceType classify(const Population& pop, const PotentialUnit& unit, double w, double z) {
  if (!pop.d_support().is_binary()) {
    fail(ErrorCode::kUnsupportedClassification,
         "four-way compliance labels need a binary treatment; profile multi-valued "
         "units by d_of_z instead");
  }
  if (!(w < z)) {
    fail(ErrorCode::kInvalidArgument, "classification pair must satisfy w < z");
  }
  const double dw = unit.d_of_z[pop.z_index(w)];
  const double dz = unit.d_of_z[pop.z_index(z)];
  if (dw == dz) return dz == 0.0 ? ComplianceType::kNeverTaker : ComplianceType::kAlwaysTaker;
  return dz > dw ? ComplianceType::kComplier : ComplianceType::kDefier;
}

TypeMasses type_masses(const Population& pop) {
  if (pop.num_z() != 2) {
    fail(ErrorCode::kUnsupportedClassification, "type masses need a binary instrument");
  }
  TypeMasses m;
  const double w = pop.z_support()[0], z = pop.z_support()[1];
  for (const auto& u : pop.units()) {
    const double mass = pop.mass(u);
    switch (classify(pop, u, w, z)) {
      case ComplianceType::kNeverTaker: m.never_taker += mass; break;
      case ComplianceType::kComplier: m.complier += mass; break;
      case ComplianceType::kDefier: m.defier += mass; break;
      case ComplianceType::kAlwaysTaker: m.always_taker += mass; break;
    }
  }
  return m;
}

MonotonicityAudit audit_monotonicity(const Population& pop) {
  MonotonicityAudit audit;
  const std::size_t K = pop.num_z();
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = k + 1; m < K; ++m) {
      bool up = false, down = false;
      for (const auto& u : pop.units()) {
        if (u.weight <= 0.0) continue;
        if (u.d_of_z[m] > u.d_of_z[k]) up = true;
        if (u.d_of_z[m] < u.d_of_z[k]) down = true;
      }
      if (up && down) {
        audit.holds = false;
        audit.offending_pairs.push_back("z=" + num(pop.z_support()[m]) +
                                        ",w=" + num(pop.z_support()[k]));
      }
    }
  }
  return audit;
}

ObservedSample realize(const Population& pop, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "sample size must be at least 1");
  std::vector<double> unit_cdf(pop.units().size());
  double run = 0.0;
  for (std::size_t i = 0; i < pop.units().size(); ++i) {
    run += pop.units()[i].weight;
    unit_cdf[i] = run;
  }
  std::vector<double> z_cdf(pop.num_z());
  std::partial_sum(pop.z_dist().begin(), pop.z_dist().end(), z_cdf.begin());

  Rng rng(seed);
  const std::size_t p = pop.covariates().size();
  SampleColumns c;
  c.y.reserve(n);
  c.d.reserve(n);
  c.z.reserve(n);
  c.x.reserve(n * p);
  auto pick = [&](const std::vector<double>& cdf) {
    const double target = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& u = pop.units()[pick(unit_cdf)];
    const std::size_t zk = pick(z_cdf);
    c.z.push_back(pop.z_support()[zk]);
    c.d.push_back(u.d_of_z[zk]);
    c.y.push_back(pop.realized_outcome(u, zk));
    c.x.insert(c.x.end(), u.x.begin(), u.x.end());
  }
  return ObservedSample(std::move(c), pop.sample_schema());
}

ObservedSample enumerate_cells(const Population& pop) {
  SampleColumns c;
  for (const auto& u : pop.units()) {
    for (std::size_t k = 0; k < pop.num_z(); ++k) {
      const double mass = pop.mass(u) * pop.z_dist()[k];
      if (!(mass > 0.0)) continue;
      c.z.push_back(pop.z_support()[k]);
      c.d.push_back(u.d_of_z[k]);
      c.y.push_back(pop.realized_outcome(u, k));
      c.x.insert(c.x.end(), u.x.begin(), u.x.end());
      c.weight.push_back(mass);
    }
  }
  return ObservedSample(std::move(c), pop.sample_schema());
}

}  // namespace late
