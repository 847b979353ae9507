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

#include <doctest.h>

#include <functional>
#include <string>
#include <vector>

#include "late/error.hpp"
#include "late/population.hpp"

namespace late::testing {

inline ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

inline std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

// Binary instrument and treatment; y0/y1 are Y(0)/Y(1), constant in z.
struct BinaryUnit {
  double d0, d1, y0, y1;
  double weight = 1.0;
  int x = -1;
};

inline Population binary_population(const std::vector<BinaryUnit>& spec,
                                    std::vector<double> z_dist = {0.5, 0.5},
                                    int x_labels = 0) {
  std::vector<PotentialUnit> units;
  CovariateSchema schema;
  if (x_labels > 0) {
    schema.names = {"x"};
    schema.labels.emplace_back();
    for (int i = 0; i < x_labels; ++i) schema.labels[0].push_back("c" + std::to_string(i));
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& s = spec[i];
    PotentialUnit u;
    u.id = "u" + std::to_string(i + 1);
    u.weight = s.weight;
    u.d_of_z = {s.d0, s.d1};
    u.y_of_zd = {{s.y0, s.y1}, {s.y0, s.y1}};
    if (x_labels > 0) u.x = {s.x};
    units.push_back(u);
  }
  return Population({0.0, 1.0}, TreatmentSupport::discrete(1), std::move(z_dist),
                    std::move(units), true, schema);
}

}  // namespace late::testing
