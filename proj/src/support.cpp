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

#include <algorithm>
#include <cmath>

#include "late/curves.hpp"
#include "late/error.hpp"
#include "late/instrument.hpp"
#include "late/support.hpp"

namespace late {

TreatmentSupport TreatmentSupport::discrete(int max_level) {
  if (max_level < 1) {
    fail(ErrorCode::kInvalidArgument, "discrete treatment needs at least two levels");
  }
  TreatmentSupport s;
  s.kind = Kind::kDiscrete;
  s.max_level = max_level;
  return s;
}

TreatmentSupport TreatmentSupport::continuous(double lo, double hi, int grid_size) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    fail(ErrorCode::kInvalidArgument, "continuous treatment interval must satisfy lo < hi");
  }
  if (grid_size < 3) {
    fail(ErrorCode::kInvalidArgument, "integration grid needs at least 3 points");
  }
  TreatmentSupport s;
  s.kind = Kind::kContinuous;
  s.lo = lo;
  s.hi = hi;
  s.grid_size = grid_size;
  return s;
}

std::string CovariateSchema::describe(std::span<const int> codes) const {
  if (names.empty()) return "(all)";
  std::string out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (k) out += '|';
    out += names[k];
    out += '=';
    out += labels[k].at(static_cast<std::size_t>(codes[k]));
  }
  return out;
}

int CovariateSchema::code_of(std::size_t covariate, const std::string& label) const {
  const auto& set = labels.at(covariate);
  auto it = std::find(set.begin(), set.end(), label);
  if (it == set.end()) return -1;
  return static_cast<int>(it - set.begin());
}

std::vector<double> InstrumentFunction::evaluate(
    const std::vector<double>& z_support, const std::vector<double>& mean_d) const {
  switch (kind) {
    case Kind::kIdentity:
      return z_support;
    case Kind::kPropensity:
      return mean_d;
    case Kind::kTable:
      if (values.size() != z_support.size()) {
        fail(ErrorCode::kInvalidArgument,
             "instrument function table needs one value per support point");
      }
      return values;
  }
  return z_support;
}

std::string InstrumentFunction::name() const {
  switch (kind) {
    case Kind::kIdentity: return "identity";
    case Kind::kPropensity: return "propensity";
    case Kind::kTable: return "table";
  }
  return "identity";
}

double StepCurve::operator()(double t) const {
  auto it = std::upper_bound(y.begin(), y.end(), t);
  if (it == y.begin()) return 0.0;
  return F[static_cast<std::size_t>(it - y.begin()) - 1];
}

double left_inverse(const StepCurve& curve, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "quantile level must lie in (0, 1)");
  }
  if (curve.y.empty()) {
    fail(ErrorCode::kIdentification, "empty distribution has no quantiles");
  }
  for (std::size_t i = 0; i < curve.y.size(); ++i) {
    if (curve.F[i] >= tau - kQuantileSlack) return curve.y[i];
  }
  return curve.y.back();
}

}  // namespace late
