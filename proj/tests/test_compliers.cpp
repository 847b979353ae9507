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

#include <algorithm>
#include <cmath>

#include "late/battery.hpp"
#include "late/compliers.hpp"
#include "late/fixtures.hpp"
#include "late/oracle.hpp"
#include "late/scenario.hpp"
#include "test_support.hpp"

using namespace late;
using late::testing::binary_population;
using late::testing::code_of;

namespace {

bool has_flag(const std::vector<std::string>& flags, const std::string& f) {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

double row_y(double y, double, std::span<const int>) { return y; }

ScenarioConfig binary_with_cells(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.covariates.names = {"x"};
  cfg.covariates.labels = {{"a", "b", "c"}};
  cfg.x_effect = {0.0, 1.0, -0.5};
  cfg.profiles = {{"nt", {0, 0}, 0.25, {0.5, 0.3, 0.2}, 0.0},
                  {"c", {0, 1}, 0.5, {0.2, 0.3, 0.5}, 0.0},
                  {"at", {1, 1}, 0.25, {0.3, 0.4, 0.3}, 0.0}};
  return cfg;
}

}  // namespace

TEST_CASE("kappa on enumerated P1") {
  const auto s = enumerate_cells(fixtures::load("P1"));
  const auto k = kappa(s, PzMap{{{}, 0.5}});
  // Rows run unit by unit, z = 0 then z = 1: AT, NT, C, C.
  CHECK(k.kappa == std::vector<double>{-1, 1, 1, -1, 1, 1, 1, 1});
  CHECK_FALSE(has_flag(k.flags, "pz_estimated"));
  double mean = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) mean += s.weight()[i] * k.kappa[i];
  CHECK(mean == 0.5);
  CHECK(has_flag(kappa(s).flags, "pz_estimated"));
}

TEST_CASE("kappa with perfect compliance is identically one") {
  SampleColumns c;
  for (int i = 0; i < 10; ++i) {
    c.z.push_back(i % 2);
    c.d.push_back(i % 2);
    c.y.push_back(i);
  }
  const ObservedSample s(std::move(c), SampleSchema{{0, 1}, TreatmentSupport::discrete(1), {}});
  for (double k : kappa(s).kappa) CHECK(k == 1.0);
}

TEST_CASE("kappa overlap and coverage errors") {
  const auto s = enumerate_cells(fixtures::load("P1"));
  CHECK(code_of([&] { kappa(s, PzMap{{{}, 1.0}}); }) == ErrorCode::kConditioning);
  const auto sx = enumerate_cells(make_scenario(binary_with_cells(1)));
  CHECK(code_of([&] { kappa(sx, PzMap{{{0}, 0.5}}); }) == ErrorCode::kInvalidArgument);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < sx.size(); ++i) {
    if (!(sx.x_row(i)[0] == 2 && sx.z()[i] == 0.0)) rows.push_back(i);
  }
  const std::string msg = late::testing::message_of([&] { kappa(sx.take(rows)); });
  CHECK(msg.find("x=c") != std::string::npos);
}

TEST_CASE("complier_mean on enumerated P1") {
  const auto s = enumerate_cells(fixtures::load("P1"));
  CHECK(complier_mean(s, row_y) == 3.0);
  CHECK(complier_mean(s, [](double, double, std::span<const int>) { return 1.0; }) == 1.0);
  const auto none = enumerate_cells(binary_population({{0, 0, 1, 2}, {1, 1, 3, 4}}));
  CHECK(code_of([&] { complier_mean(none, row_y); }) == ErrorCode::kIdentification);
}

TEST_CASE("complier covariate frequencies agree with the Bayes ratio") {
  const Population pop = make_scenario(binary_with_cells(3));
  const auto s = enumerate_cells(pop);
  double check_total = 0.0;
  for (int x = 0; x < 3; ++x) {
    double px = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.x_row(i)[0] == x) px += s.weight()[i];
    }
    const double freq = complier_mean(
        s, [x](double, double, std::span<const int> row) { return row[0] == x ? 1.0 : 0.0; });
    CHECK(freq == doctest::Approx(bayes_ratio(s, {x}) * px).epsilon(1e-12));
    check_total += bayes_ratio(s, {x}) * px;
  }
  CHECK(check_total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bayes_ratio special cases") {
  SUBCASE("compliance independent of the covariate") {
    const auto pop = binary_population(
        {{0, 1, 0, 1, 1, 0}, {0, 0, 0, 1, 1, 0}, {0, 1, 0, 2, 1, 1}, {0, 0, 0, 3, 1, 1}},
        {0.5, 0.5}, 2);
    const auto s = enumerate_cells(pop);
    CHECK(bayes_ratio(s, {0}) == doctest::Approx(1.0));
    CHECK(bayes_ratio(s, {1}) == doctest::Approx(1.0));
  }
  SUBCASE("compliers only in one cell") {
    const auto pop = binary_population(
        {{0, 1, 0, 1, 1, 0}, {0, 0, 0, 1, 1, 1}, {1, 1, 0, 2, 1, 1}, {0, 0, 0, 3, 1, 1}},
        {0.5, 0.5}, 2);
    const auto s = enumerate_cells(pop);
    CHECK(bayes_ratio(s, {0}) == doctest::Approx(4.0));  // 1 / P(X = a)
    CHECK(bayes_ratio(s, {1}) == doctest::Approx(0.0));
  }
  SUBCASE("empty arm within the cell") {
    const auto s = enumerate_cells(make_scenario(binary_with_cells(1)));
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(s.x_row(i)[0] == 1 && s.z()[i] == 1.0)) rows.push_back(i);
    }
    CHECK(code_of([&] { bayes_ratio(s.take(rows), {1}); }) == ErrorCode::kConditioning);
  }
}

TEST_CASE("complier outcome CDFs and QTE on enumerated P1") {
  const auto s = enumerate_cells(fixtures::load("P1"));
  const StepCurve f1 = complier_outcome_cdf(s, 1, {4.0});
  CHECK(f1(4.0) == 0.5);
  CHECK(qte(s, 0.5) == 4.0);
  const StepCurve full = complier_outcome_cdf(s, 1);
  CHECK(full(5.99) == 0.5);
  CHECK(full(6.0) == 1.0);
  CHECK(full.flags.empty());
}

TEST_CASE("null effects give zero sample QTE") {
  const auto s = enumerate_cells(
      binary_population({{0, 1, 1, 1}, {0, 1, 3, 3}, {0, 0, 5, 5}, {1, 1, 2, 2}, {0, 1, -1, -1}}));
  for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9}) CHECK(qte(s, tau) == 0.0);
}

TEST_CASE("sample CDFs are clipped and rearranged with flags") {
  SampleColumns c;
  // Defier-heavy data make the raw arm-1 curve non-monotone.
  c.z = {0, 0, 0, 0, 1, 1, 1, 1};
  c.d = {1, 1, 0, 0, 1, 1, 1, 0};
  c.y = {1, 3, 0, 0, 2, 4, 5, 0};
  const ObservedSample s(std::move(c), SampleSchema{{0, 1}, TreatmentSupport::discrete(1), {}});
  const StepCurve f = complier_outcome_cdf(s, 1);
  CHECK(std::is_sorted(f.F.begin(), f.F.end()));
  for (double v : f.F) CHECK((v >= 0.0 && v <= 1.0));
  CHECK((has_flag(f.flags, "clipped") || has_flag(f.flags, "rearranged")));
}

TEST_CASE("profile_compliers summary") {
  const Population pop = make_scenario(binary_with_cells(5));
  const ComplierProfile p = profile_compliers(enumerate_cells(pop));
  CHECK(p.share == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.kappa_mean == doctest::Approx(p.share).epsilon(1e-12));
  CHECK(p.share_of_treated ==
        doctest::Approx(oracle::true_basic(pop, oracle::BasicParameter::kComplierShareOfTreated))
            .epsilon(1e-12));
  REQUIRE(p.covariate_ratios.size() == 3);
  CHECK(p.covariate_ratios[0].first == "x=a");
  CHECK(p.covariate_ratios[0].second == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(p.kappa_negative_fraction > 0.0);
}

TEST_CASE("property: enumerated complier quantities equal the oracle") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Population pop = make_scenario(seed % 2 ? binary_with_cells(seed)
                                                  : battery::binary_multi_z(seed, 2));
    const auto s = enumerate_cells(pop);
    CHECK(std::abs(complier_mean(s, row_y) - oracle::true_complier_mean(pop, row_y)) < 1e-10);
    const auto d = [](double, double d, std::span<const int>) { return d; };
    CHECK(std::abs(complier_mean(s, d) - oracle::true_complier_mean(pop, d)) < 1e-10);
    for (int arm : {0, 1}) {
      const StepCurve truth = oracle::true_complier_outcome(pop, arm);
      const StepCurve est = complier_outcome_cdf(s, arm, truth.y);
      CHECK(est.flags.empty());
      for (std::size_t i = 0; i < truth.y.size(); ++i) {
        CHECK(std::abs(est(truth.y[i]) - truth.F[i]) < 1e-10);
      }
    }
    for (double tau : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CHECK(qte(s, tau) == doctest::Approx(oracle::true_qte(pop, tau)).epsilon(1e-12));
    }
    const ComplierProfile p = profile_compliers(s);
    CHECK(p.share_of_treated >= 0.0);
    CHECK(p.share_of_treated <= 1.0);
  }
}
