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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "late/support.hpp"

namespace late {

// Real function of one observed row (Y, D, X).
using RowFunction = std::function<double(double y, double d, std::span<const int> x)>;

struct SampleSchema {
  std::vector<double> z_support;
  TreatmentSupport d_support;
  CovariateSchema covariates;

  bool operator==(const SampleSchema&) const = default;
};

// Column storage handed to the ObservedSample constructor. `x` is row-major
// (rows x covariates). An empty `weight` means unit weights.
struct SampleColumns {
  std::vector<double> y;
  std::vector<double> d;
  std::vector<double> z;
  std::vector<int> x;
  std::vector<double> weight;
};

// Immutable table of observed (Y, D, Z, X) rows with optional row weights.
// Construction validates every cell against the schema.
class ObservedSample {
 public:
  ObservedSample(SampleColumns columns, SampleSchema schema);

  std::size_t size() const { return y_.size(); }
  bool weighted() const { return weighted_; }
  const SampleSchema& schema() const { return schema_; }

  std::span<const double> y() const { return y_; }
  std::span<const double> d() const { return d_; }
  std::span<const double> z() const { return z_; }
  std::span<const double> weight() const { return w_; }
  std::span<const int> x_row(std::size_t i) const;
  std::span<const int> x_codes() const { return x_; }

  // Position of each row's instrument value in schema().z_support.
  std::span<const int> z_index() const { return z_index_; }
  // Distinct observed covariate vectors, sorted; rows map into them.
  const std::vector<std::vector<int>>& x_cells() const { return x_cells_; }
  std::span<const int> x_cell() const { return x_cell_; }
  // -1 when the covariate vector does not occur in the sample.
  int find_x_cell(std::span<const int> codes) const;

  double total_weight() const { return total_weight_; }

  // Rows picked by index (repetition allowed), schema preserved.
  ObservedSample take(std::span<const std::size_t> rows) const;

 private:
  std::vector<double> y_, d_, z_, w_;
  std::vector<int> x_;
  std::vector<int> z_index_;
  std::vector<int> x_cell_;
  std::vector<std::vector<int>> x_cells_;
  SampleSchema schema_;
  bool weighted_ = false;
  double total_weight_ = 0.0;
};

}  // namespace late
