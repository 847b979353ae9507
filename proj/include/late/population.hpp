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
#include <vector>

#include "late/sample.hpp"
#include "late/support.hpp"

namespace late {

// Smooth dose-response curve c0 + c1 d + c2 d^2 + ... + a sin(f d).
struct OutcomeCurve {
  std::vector<double> poly;
  double sine_amplitude = 0.0;
  double sine_frequency = 0.0;

  double operator()(double d) const;
  bool operator==(const OutcomeCurve&) const = default;
};

// One unit's full counterfactual table. `d_of_z[k]` is D(z_k); for discrete
// supports `y_of_zd[k][j]` is Y(z_k, j); for continuous supports
// `y_curve[k]` is d -> Y(z_k, d).
struct PotentialUnit {
  std::string id;
  double weight = 1.0;
  std::vector<double> d_of_z;
  std::vector<std::vector<double>> y_of_zd;
  std::vector<OutcomeCurve> y_curve;
  std::vector<int> x;

  bool operator==(const PotentialUnit&) const = default;
};

// Finite weighted population with a known instrument distribution.
// Immutable; the constructor enforces every structural invariant.
class Population {
 public:
  Population(std::vector<double> z_support, TreatmentSupport d_support,
             std::vector<double> z_dist, std::vector<PotentialUnit> units,
             bool exclusion_holds, CovariateSchema covariates = {},
             std::vector<std::string> assumptions = {});

  const std::vector<double>& z_support() const { return z_support_; }
  const TreatmentSupport& d_support() const { return d_support_; }
  const std::vector<double>& z_dist() const { return z_dist_; }
  const std::vector<PotentialUnit>& units() const { return units_; }
  bool exclusion_holds() const { return exclusion_holds_; }
  const CovariateSchema& covariates() const { return covariates_; }
  // Scenario tags such as "AS" (no selection) and "L" (linear effects).
  const std::vector<std::string>& assumptions() const { return assumptions_; }
  bool has_assumption(const std::string& tag) const;

  std::size_t num_z() const { return z_support_.size(); }
  double total_weight() const { return total_weight_; }
  // Unit mass normalized so that all units sum to one.
  double mass(const PotentialUnit& u) const { return u.weight / total_weight_; }
  std::size_t z_index(double z) const;

  // Y(z_k, d). Discrete supports require an integer level.
  double outcome(const PotentialUnit& u, std::size_t zk, double d) const;
  // Y(d) with the instrument integrated out over z_dist; equals Y(z, d)
  // for every z when exclusion holds.
  double averaged_outcome(const PotentialUnit& u, double d) const;
  // Y(j) - Y(j-1), instrument integrated out.
  double level_effect(const PotentialUnit& u, int level) const;
  // Y(z_k, D(z_k)).
  double realized_outcome(const PotentialUnit& u, std::size_t zk) const;

  // True iff Y(z, d) does not vary with z for this unit.
  bool unit_satisfies_exclusion(const PotentialUnit& u) const;

  SampleSchema sample_schema() const;

  // Same supports and flags with a different unit list (validated).
  Population with_units(std::vector<PotentialUnit> units, bool exclusion_holds) const;

  bool operator==(const Population&) const = default;

 private:
  std::vector<double> z_support_;
  TreatmentSupport d_support_;
  std::vector<double> z_dist_;
  std::vector<PotentialUnit> units_;
  bool exclusion_holds_ = true;
  CovariateSchema covariates_;
  std::vector<std::string> assumptions_;
  double total_weight_ = 0.0;
};

enum class ComplianceType { kNeverTaker, kComplier, kDefier, kAlwaysTaker };

const char* to_string(ComplianceType type);

// Four-way label of a binary-treatment unit for the instrument pair (w, z)
// with w below z in the support order.
ComplianceType classify(const Population& pop, const PotentialUnit& unit,
                        double w, double z);

struct TypeMasses {
  double never_taker = 0.0;
  double complier = 0.0;
  double defier = 0.0;
  double always_taker = 0.0;
};

// Normalized masses of the four types for a binary instrument and treatment.
TypeMasses type_masses(const Population& pop);

struct MonotonicityAudit {
  bool holds = true;
  // "z=a,w=b" for each pair where units move in both directions.
  std::vector<std::string> offending_pairs;
};

// For every pair of instrument values, checks that D(z) >= D(w) for all
// units or D(z) <= D(w) for all units.
MonotonicityAudit audit_monotonicity(const Population& pop);

// i.i.d. draws: unit proportional to weight, Z from z_dist independently,
// D = D(Z), Y = Y(Z, D).
ObservedSample realize(const Population& pop, std::size_t n, std::uint64_t seed);

// One row per (unit, z) cell with mass weight * P(Z = z); zero-mass cells
// are skipped. Weighted moments equal population moments exactly.
ObservedSample enumerate_cells(const Population& pop);

}  // namespace late
