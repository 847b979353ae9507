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

// Serial reference kernels against their OpenMP versions.
//   bench_kernels [rows] [replicates]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "late/battery.hpp"
#include "late/estimators.hpp"
#include "late/kernels.hpp"
#include "late/population.hpp"
#include "late/random.hpp"

namespace {

template <typename Fn>
double seconds(Fn&& fn, int repeats) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t rows = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4'000'000;
  const std::size_t reps = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 200;

  late::Rng rng(11);
  const std::size_t cells = 64;
  std::vector<int> cell(rows);
  std::vector<double> y(rows), d(rows), w(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    cell[i] = static_cast<int>(rng.below(cells));
    y[i] = rng.normal();
    d[i] = static_cast<double>(rng.below(3));
    w[i] = rng.uniform(0.5, 1.5);
  }

  std::vector<late::kernels::Moments> ms, mp;
  const double ts = seconds([&] { ms = late::kernels::cell_moments_serial(cell, y, d, w, cells); }, 5);
  const double tp = seconds([&] { mp = late::kernels::cell_moments(cell, y, d, w, cells); }, 5);
  double diff = 0.0;
  for (std::size_t c = 0; c < cells; ++c) diff = std::max(diff, std::abs(ms[c].wyd - mp[c].wyd));
  std::printf("cell_moments  rows=%zu  serial %.4f s  openmp %.4f s  speedup %.2fx  max|diff| %.3g\n",
              rows, ts, tp, ts / tp, diff);

  const auto pop = late::make_scenario(late::battery::by_name("binary", 5));
  const auto sample = late::realize(pop, 10'000, 5);
  late::BootstrapResult bs, bp;
  const double us = seconds(
      [&] { bs = late::bootstrap(sample, late::Estimator::kWald, reps, 9, {}, late::Execution::kSerial); }, 1);
  const double up = seconds(
      [&] { bp = late::bootstrap(sample, late::Estimator::kWald, reps, 9, {}, late::Execution::kParallel); }, 1);
  std::printf("bootstrap     B=%zu n=10000  serial %.4f s  openmp %.4f s  speedup %.2fx  se %s\n",
              reps, us, up, us / up, bs.se == bp.se ? "identical" : "DIFFERENT");
  std::printf("threads cap (LATE_ENGINE_THREADS): %d\n", late::kernels::thread_cap());
  return bs.se == bp.se ? 0 : 1;
}
