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

#include "late/sample.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "late/error.hpp"

namespace late {

namespace {

std::string row_label(std::size_t i) { return "row " + std::to_string(i + 1); }

}  // namespace

ObservedSample::ObservedSample(SampleColumns columns, SampleSchema schema)
    : y_(std::move(columns.y)),
      d_(std::move(columns.d)),
      z_(std::move(columns.z)),
      w_(std::move(columns.weight)),
      x_(std::move(columns.x)),
      schema_(std::move(schema)) {
  const std::size_t n = y_.size();
  const std::size_t p = schema_.covariates.size();
  if (d_.size() != n || z_.size() != n) {
    fail(ErrorCode::kInvalidArgument, "sample columns have different lengths");
  }
  if (x_.size() != n * p) {
    fail(ErrorCode::kInvalidArgument, "covariate block does not match rows x covariates");
  }
  if (schema_.covariates.labels.size() != p) {
    fail(ErrorCode::kInvalidArgument, "covariate schema needs one label set per name");
  }
  if (schema_.z_support.empty() ||
      !std::is_sorted(schema_.z_support.begin(), schema_.z_support.end()) ||
      std::adjacent_find(schema_.z_support.begin(), schema_.z_support.end()) !=
          schema_.z_support.end()) {
    fail(ErrorCode::kInvalidArgument, "instrument support must be strictly increasing");
  }
  weighted_ = !w_.empty();
  if (!weighted_) w_.assign(n, 1.0);
  if (w_.size() != n) fail(ErrorCode::kInvalidArgument, "weight column has wrong length");

  z_index_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y_[i])) fail(ErrorCode::kInvalidArgument, row_label(i) + ": outcome is not finite");
    if (!std::isfinite(d_[i])) fail(ErrorCode::kInvalidArgument, row_label(i) + ": treatment is not finite");
    if (!std::isfinite(w_[i]) || w_[i] < 0.0) {
      fail(ErrorCode::kInvalidArgument, row_label(i) + ": weight must be finite and nonnegative");
    }
    if (schema_.d_support.is_discrete()) {
      const double level = d_[i];
      if (level != std::floor(level) || level < 0.0 || level > schema_.d_support.max_level) {
        fail(ErrorCode::kInvalidArgument,
             row_label(i) + ": treatment value outside the discrete support");
      }
    }
    auto it = std::lower_bound(schema_.z_support.begin(), schema_.z_support.end(), z_[i]);
    if (it == schema_.z_support.end() || *it != z_[i]) {
      fail(ErrorCode::kInvalidArgument, row_label(i) + ": instrument value outside the support");
    }
    z_index_[i] = static_cast<int>(it - schema_.z_support.begin());
    for (std::size_t k = 0; k < p; ++k) {
      const int code = x_[i * p + k];
      if (code < 0 || static_cast<std::size_t>(code) >= schema_.covariates.labels[k].size()) {
        fail(ErrorCode::kInvalidArgument, row_label(i) + ": covariate '" +
                                              schema_.covariates.names[k] +
                                              "' outside its label set");
      }
    }
    total_weight_ += w_[i];
  }

  std::map<std::vector<int>, int> cells;
  for (std::size_t i = 0; i < n; ++i) {
    cells.emplace(std::vector<int>(x_.begin() + i * p, x_.begin() + (i + 1) * p), 0);
  }
  int next = 0;
  for (auto& [key, idx] : cells) {
    idx = next++;
    x_cells_.push_back(key);
  }
  x_cell_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_cell_[i] = cells.at(std::vector<int>(x_.begin() + i * p, x_.begin() + (i + 1) * p));
  }
}

std::span<const int> ObservedSample::x_row(std::size_t i) const {
  const std::size_t p = schema_.covariates.size();
  return std::span<const int>(x_).subspan(i * p, p);
}

int ObservedSample::find_x_cell(std::span<const int> codes) const {
  std::vector<int> key(codes.begin(), codes.end());
  auto it = std::lower_bound(x_cells_.begin(), x_cells_.end(), key);
  if (it == x_cells_.end() || *it != key) return -1;
  return static_cast<int>(it - x_cells_.begin());
}

ObservedSample ObservedSample::take(std::span<const std::size_t> rows) const {
  const std::size_t p = schema_.covariates.size();
  SampleColumns c;
  c.y.reserve(rows.size());
  c.d.reserve(rows.size());
  c.z.reserve(rows.size());
  c.x.reserve(rows.size() * p);
  if (weighted_) c.weight.reserve(rows.size());
  for (std::size_t r : rows) {
    c.y.push_back(y_[r]);
    c.d.push_back(d_[r]);
    c.z.push_back(z_[r]);
    for (std::size_t k = 0; k < p; ++k) c.x.push_back(x_[r * p + k]);
    if (weighted_) c.weight.push_back(w_[r]);
  }
  return ObservedSample(std::move(c), schema_);
}

}  // namespace late
