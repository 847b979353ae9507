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
#include <vector>

namespace late::kernels {

// Weighted first and second moments of (Y, D) within one cell.
struct Moments {
  double w = 0.0;
  double wy = 0.0;
  double wd = 0.0;
  double wyy = 0.0;
  double wyd = 0.0;
  double wdd = 0.0;

  Moments& operator+=(const Moments& o) {
    w += o.w;
    wy += o.wy;
    wd += o.wd;
    wyy += o.wyy;
    wyd += o.wyd;
    wdd += o.wdd;
    return *this;
  }
  double mean_y() const { return wy / w; }
  double mean_d() const { return wd / w; }
};

// Rows per reduction chunk. Fixed so that the parallel result does not
// depend on the thread count.
inline constexpr std::size_t kChunkRows = std::size_t{1} << 14;

// Reference implementation: one pass, rows in order.
std::vector<Moments> cell_moments_serial(std::span<const int> cell, std::span<const double> y,
                                         std::span<const double> d, std::span<const double> w,
                                         std::size_t num_cells);

// OpenMP implementation: per-chunk partials reduced in chunk order. Equal to
// the serial result whenever the input fits in one chunk.
std::vector<Moments> cell_moments(std::span<const int> cell, std::span<const double> y,
                                  std::span<const double> d, std::span<const double> w,
                                  std::size_t num_cells);

// Runs body(0..count-1). The body must not throw and must only write state
// owned by its index.
void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& body);
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);

// Thread cap from LATE_ENGINE_THREADS (0 or unset = runtime default).
int thread_cap();

}  // namespace late::kernels
