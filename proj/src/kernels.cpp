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

#include "late/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "late/error.hpp"

namespace late::kernels {

namespace {

void check_lengths(std::span<const int> cell, std::span<const double> y,
                   std::span<const double> d, std::span<const double> w) {
  if (y.size() != cell.size() || d.size() != cell.size() || w.size() != cell.size()) {
    fail(ErrorCode::kInvalidArgument, "moment kernel inputs have different lengths");
  }
}

void accumulate(std::vector<Moments>& out, std::span<const int> cell, std::span<const double> y,
                std::span<const double> d, std::span<const double> w, std::size_t begin,
                std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    Moments& m = out[static_cast<std::size_t>(cell[i])];
    const double wi = w[i], yi = y[i], di = d[i];
    m.w += wi;
    m.wy += wi * yi;
    m.wd += wi * di;
    m.wyy += wi * yi * yi;
    m.wyd += wi * yi * di;
    m.wdd += wi * di * di;
  }
}

int resolved_threads() {
  const int cap = thread_cap();
#ifdef _OPENMP
  return cap > 0 ? cap : omp_get_max_threads();
#else
  (void)cap;
  return 1;
#endif
}

}  // namespace

int thread_cap() {
  const char* env = std::getenv("LATE_ENGINE_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 0) return 0;
  return static_cast<int>(v);
}

std::vector<Moments> cell_moments_serial(std::span<const int> cell, std::span<const double> y,
                                         std::span<const double> d, std::span<const double> w,
                                         std::size_t num_cells) {
  check_lengths(cell, y, d, w);
  std::vector<Moments> out(num_cells);
  accumulate(out, cell, y, d, w, 0, cell.size());
  return out;
}

std::vector<Moments> cell_moments(std::span<const int> cell, std::span<const double> y,
                                  std::span<const double> d, std::span<const double> w,
                                  std::size_t num_cells) {
  check_lengths(cell, y, d, w);
  const std::size_t n = cell.size();
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  if (chunks <= 1) return cell_moments_serial(cell, y, d, w, num_cells);

  std::vector<std::vector<Moments>> partial(chunks, std::vector<Moments>(num_cells));
  const long long nchunks = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static) num_threads(resolved_threads())
  for (long long c = 0; c < nchunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunkRows;
    const std::size_t end = std::min(n, begin + kChunkRows);
    accumulate(partial[static_cast<std::size_t>(c)], cell, y, d, w, begin, end);
  }
  std::vector<Moments> out(num_cells);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < num_cells; ++k) out[k] += p[k];
  }
  return out;
}

void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body) {
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolved_threads())
  for (long long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace late::kernels
