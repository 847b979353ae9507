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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "late/battery.hpp"
#include "late/error.hpp"
#include "late/fixtures.hpp"
#include "late/oracle.hpp"
#include "late/population.hpp"
#include "late/scenario.hpp"

using namespace late;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

double weighted_mean_y(const ObservedSample& s, double z) {
  double w = 0.0, wy = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.z()[i] != z) continue;
    w += s.weight()[i];
    wy += s.weight()[i] * s.y()[i];
  }
  return wy / w;
}

}  // namespace

TEST_CASE("classify follows the compliance table") {
  const Population p1 = fixtures::load("P1");
  const auto& u = p1.units();
  CHECK(classify(p1, u[2], 0, 1) == ComplianceType::kComplier);
  CHECK(classify(p1, u[0], 0, 1) == ComplianceType::kAlwaysTaker);
  CHECK(classify(p1, u[1], 0, 1) == ComplianceType::kNeverTaker);
  const Population p2 = fixtures::load("P2");
  CHECK(classify(p2, p2.units()[4], 0, 1) == ComplianceType::kDefier);
}

TEST_CASE("classify rejects multi-valued treatments and unordered pairs") {
  const Population p3 = fixtures::load("P3");
  CHECK(code_of([&] { classify(p3, p3.units()[0], 0, 1); }) ==
        ErrorCode::kUnsupportedClassification);
  const Population p1 = fixtures::load("P1");
  CHECK(code_of([&] { classify(p1, p1.units()[0], 1, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("make_scenario realizes type shares exactly") {
  ScenarioConfig cfg;
  cfg.type_shares = TypeShares{0.25, 0.5, 0.0, 0.25};
  cfg.seed = 3;
  const Population pop = make_scenario(cfg);
  const TypeMasses m = type_masses(pop);
  CHECK(m.complier == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.never_taker == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.defier == 0.0);
  CHECK(pop.exclusion_holds());
  CHECK(audit_monotonicity(pop).holds);
}

TEST_CASE("a defier share is flagged as a monotonicity violation") {
  ScenarioConfig cfg;
  cfg.type_shares = TypeShares{0.2, 0.4, 0.2, 0.2};
  const Population pop = make_scenario(cfg);
  CHECK(type_masses(pop).defier == doctest::Approx(0.2));
  const auto audit = audit_monotonicity(pop);
  CHECK_FALSE(audit.holds);
  REQUIRE(audit.offending_pairs.size() == 1);
  CHECK(audit.offending_pairs[0] == "z=1,w=0");
}

TEST_CASE("fixture P1 has complier share one half and LATE 4") {
  const Population p1 = fixtures::load("P1");
  CHECK(p1.units().size() == 4);
  CHECK(type_masses(p1).complier == 0.5);
  CHECK(oracle::true_late(p1, 1, 0) == 4.0);
}

TEST_CASE("infeasible shares are a config error") {
  ScenarioConfig cfg;
  cfg.type_shares = TypeShares{0.3, 0.5, 0.0, 0.3};
  CHECK(code_of([&] { make_scenario(cfg); }) == ErrorCode::kConfig);
  ScenarioConfig neg;
  neg.type_shares = TypeShares{-0.1, 0.6, 0.0, 0.5};
  CHECK(code_of([&] { make_scenario(neg); }) == ErrorCode::kConfig);
}

TEST_CASE("exclusion flag is false exactly when a direct effect is configured") {
  CHECK(make_scenario(battery::direct_effect(1)).exclusion_holds() == false);
  CHECK(make_scenario(battery::direct_effect(1, 0.0, 0.0)).exclusion_holds() == true);
}

TEST_CASE("make_scenario is deterministic in the seed") {
  const auto a = make_scenario(battery::multi_level(9, 3, 2, 2));
  const auto b = make_scenario(battery::multi_level(9, 3, 2, 2));
  const auto c = make_scenario(battery::multi_level(10, 3, 2, 2));
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("realize: first stage near one half on P1") {
  const Population p1 = fixtures::load("P1");
  const ObservedSample s = realize(p1, 4000, 7);
  double n1 = 0, d1 = 0, n0 = 0, d0 = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.z()[i] == 1.0) {
      ++n1;
      d1 += s.d()[i];
    } else {
      ++n0;
      d0 += s.d()[i];
    }
  }
  // Standard error of the difference is about 0.016.
  CHECK(std::abs(d1 / n1 - d0 / n0 - 0.5) < 0.08);
}

TEST_CASE("realize with a degenerate instrument distribution") {
  const Population p1 = fixtures::load("P1");
  const Population deg(p1.z_support(), p1.d_support(), {1.0, 0.0}, p1.units(), true);
  const ObservedSample s = realize(deg, 500, 1);
  for (double z : s.z()) CHECK(z == 0.0);
}

TEST_CASE("realize is bit-identical for the same seed") {
  const Population pop = make_scenario(battery::binary_multi_z(4, 3));
  const auto a = realize(pop, 1000, 99);
  const auto b = realize(pop, 1000, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.y()[i] == b.y()[i]);
    CHECK(a.d()[i] == b.d()[i]);
    CHECK(a.z()[i] == b.z()[i]);
  }
  CHECK_THROWS_AS(realize(pop, 0, 1), Error);
}

TEST_CASE("enumerate_cells reproduces P1 moments") {
  const Population p1 = fixtures::load("P1");
  const ObservedSample s = enumerate_cells(p1);
  CHECK(s.size() == 8);
  for (double w : s.weight()) CHECK(w == 0.125);
  CHECK(weighted_mean_y(s, 1) == 4.0);
  CHECK(weighted_mean_y(s, 0) == 2.0);
}

TEST_CASE("enumerate_cells skips zero-mass cells and keeps continuous doses") {
  const Population p1 = fixtures::load("P1");
  const Population deg(p1.z_support(), p1.d_support(), {1.0, 0.0}, p1.units(), true);
  CHECK(enumerate_cells(deg).size() == 4);
  const Population cont = make_scenario(battery::continuous(2, 3, true));
  const ObservedSample s = enumerate_cells(cont);
  CHECK(s.schema().d_support.is_continuous());
  CHECK(s.size() == cont.units().size() * 3);
}

TEST_CASE("population constructor enforces invariants") {
  const Population p1 = fixtures::load("P1");
  CHECK(code_of([&] {
          Population(p1.z_support(), p1.d_support(), {0.5, 0.6}, p1.units(), true);
        }) == ErrorCode::kInvalidArgument);
  auto units = p1.units();
  units[0].weight = -1.0;
  CHECK(code_of([&] { Population(p1.z_support(), p1.d_support(), p1.z_dist(), units, true); }) ==
        ErrorCode::kInvalidArgument);
  units = p1.units();
  units[0].y_of_zd[1][1] += 1.0;
  CHECK(code_of([&] { Population(p1.z_support(), p1.d_support(), p1.z_dist(), units, true); }) ==
        ErrorCode::kInvalidArgument);
  CHECK_NOTHROW(Population(p1.z_support(), p1.d_support(), p1.z_dist(), units, false));
  units = p1.units();
  for (auto& u : units) u.weight = 0.0;
  CHECK(code_of([&] { Population(p1.z_support(), p1.d_support(), p1.z_dist(), units, true); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("property: exclusion-flagged populations have outcomes constant in z") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (const auto& cfg : {battery::binary_multi_z(seed, 3), battery::multi_level(seed, 3, 3, 2),
                            battery::defier_mix(seed)}) {
      const Population pop = make_scenario(cfg);
      REQUIRE(pop.exclusion_holds());
      for (const auto& u : pop.units()) {
        for (std::size_t k = 1; k < pop.num_z(); ++k) CHECK(u.y_of_zd[k] == u.y_of_zd[0]);
      }
    }
  }
}

TEST_CASE("property: type masses partition the population") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Population pop = make_scenario(battery::defier_mix(seed));
    const TypeMasses m = type_masses(pop);
    CHECK(m.never_taker + m.complier + m.defier + m.always_taker == doctest::Approx(1.0).epsilon(1e-14));
    double sum = 0.0;
    for (const auto& u : pop.units()) sum += pop.mass(u);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("property: monotonicity audit passes exactly when defier mass is zero") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double share = (seed % 5) * 0.1;
    const Population pop = make_scenario(battery::defier_share(share, seed));
    CHECK(audit_monotonicity(pop).holds == (type_masses(pop).defier == 0.0));
  }
}

TEST_CASE("property: sample moments converge to enumerated cell moments") {
  const Population pop = make_scenario(battery::binary_multi_z(21, 3));
  const ObservedSample cells = enumerate_cells(pop);
  const std::size_t n = 100000;
  const ObservedSample s = realize(pop, n, 2024);
  for (double z : pop.z_support()) {
    double w = 0, wy = 0, wyy = 0, wd = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells.z()[i] != z) continue;
      w += cells.weight()[i];
      wy += cells.weight()[i] * cells.y()[i];
      wyy += cells.weight()[i] * cells.y()[i] * cells.y()[i];
      wd += cells.weight()[i] * cells.d()[i];
    }
    const double pz = w, mean = wy / w, sd = std::sqrt(wyy / w - mean * mean);
    const double md = wd / w;
    double c = 0, sy = 0, sd_ = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (s.z()[i] != z) continue;
      ++c;
      sy += s.y()[i];
      sd_ += s.d()[i];
    }
    const double nz = c;
    CHECK(std::abs(c / n - pz) <= 5 * std::sqrt(pz * (1 - pz) / n));
    CHECK(std::abs(sy / nz - mean) <= 5 * sd / std::sqrt(nz));
    CHECK(std::abs(sd_ / nz - md) <= 5 * std::sqrt(md * (1 - md) / nz) + 1e-12);
  }
}
