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
#include "late/diagnostics.hpp"
#include "late/fixtures.hpp"
#include "late/oracle.hpp"
#include "late/scenario.hpp"
#include "test_support.hpp"

using namespace late;
using late::testing::binary_population;
using late::testing::code_of;

namespace {

double driver(const SensitivityReport& r, const std::string& name) {
  for (const auto& [k, v] : r.drivers) {
    if (k == name) return v;
  }
  FAIL("missing driver " << name);
  return 0.0;
}

// P1 with a direct instrument effect of size h on the always-taker u1.
Population p1_with_direct_effect(double h) {
  const Population p1 = fixtures::load("P1");
  auto units = p1.units();
  for (double& y : units[0].y_of_zd[1]) y += h;
  return p1.with_units(units, h == 0.0);
}

}  // namespace

TEST_CASE("monotonicity_check on fixtures") {
  const auto r3 = monotonicity_check(enumerate_cells(fixtures::load("P3")));
  REQUIRE(r3.differences.size() == 2);
  CHECK(r3.differences[0] == doctest::Approx(2.0 / 3.0));
  CHECK(r3.differences[1] == doctest::Approx(1.0 / 3.0));
  CHECK(r3.consistent);
  CHECK(r3.verdict == "consistent");
  // Defiers hide behind a larger complier share: the implication cannot see them.
  const auto r2 = monotonicity_check(enumerate_cells(fixtures::load("P2")));
  CHECK(r2.differences[0] == doctest::Approx(0.2));
  CHECK(r2.consistent);
}

TEST_CASE("monotonicity_check detects a defier majority") {
  const auto r = monotonicity_check(enumerate_cells(make_scenario(battery::defier_share(0.6, 2))));
  CHECK_FALSE(r.consistent);
  CHECK(r.crossing_levels == std::vector<int>{1});
  CHECK(r.verdict == "crossing detected at levels 1");
}

TEST_CASE("monotonicity_check with a bootstrap band on samples") {
  const auto ok = monotonicity_check_bootstrap(realize(fixtures::load("P3"), 5000, 3), 9, 200);
  CHECK(ok.consistent);
  for (double e : ok.epsilon) CHECK(e >= 0.0);
  const auto bad = monotonicity_check_bootstrap(
      realize(make_scenario(battery::defier_share(0.6, 2)), 5000, 3), 9, 200);
  CHECK_FALSE(bad.consistent);
}

TEST_CASE("relevance_check") {
  const auto r = relevance_check(enumerate_cells(fixtures::load("P1")));
  CHECK(r.first_stage == 0.5);
  CHECK(r.pass);
  const auto flat = enumerate_cells(binary_population({{0, 0, 1, 2}, {1, 1, 0, 3}}));
  CHECK(code_of([&] { relevance_check(flat); }) == ErrorCode::kWeakInstrument);
  // Complier weight 0.005 out of 1.
  const auto weak = enumerate_cells(
      binary_population({{0, 1, 0, 1, 0.005}, {0, 0, 0, 1, 0.6}, {1, 1, 0, 1, 0.395}}));
  const auto w = relevance_check(weak);
  CHECK(w.first_stage == doctest::Approx(0.005));
  CHECK_FALSE(w.pass);
  CHECK(w.flags == std::vector<std::string>{"weak_instrument"});
  CHECK(relevance_check(weak, 0.001).pass);
}

TEST_CASE("saturation_check verdicts") {
  const auto s = enumerate_cells(make_scenario(battery::multi_level(3, 3, 2, 3)));
  CHECK(saturation_check(s, CovariateSpecification::parse("cells")).verdict == "saturated");
  CHECK(saturation_check(s, CovariateSpecification::parse("cells:x")).pass);
  const auto lin = saturation_check(s, CovariateSpecification::parse("linear"));
  CHECK_FALSE(lin.pass);
  CHECK(lin.verdict == "refused");
  CHECK(lin.flags == std::vector<std::string>{"non_saturated_covariates"});
  CHECK_FALSE(saturation_check(s, CovariateSpecification::parse("none")).pass);
  const auto unknown = saturation_check(s, CovariateSpecification::parse("cells:age"));
  CHECK_FALSE(unknown.pass);
  CHECK(unknown.flags == std::vector<std::string>{"unknown_covariate"});
  const auto single = enumerate_cells(make_scenario(battery::multi_level(3, 3, 2, 1)));
  const auto triv = saturation_check(single, CovariateSpecification::parse("cells"));
  CHECK(triv.pass);
  CHECK(triv.verdict == "trivially_saturated");
}

TEST_CASE("covariate specification parsing") {
  CHECK(CovariateSpecification::parse("cells").describe() == "cells");
  CHECK(CovariateSpecification::parse("cells:a,b").covariates == std::vector<std::string>{"a", "b"});
  CHECK(CovariateSpecification::parse("linear").form == CovariateSpecification::Form::kLinear);
  CHECK(code_of([] { CovariateSpecification::parse("splines"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("exclusion_sensitivity on P1 with a direct effect") {
  const auto r = exclusion_sensitivity(p1_with_direct_effect(1.0));
  CHECK(r.biased_estimand == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(r.true_late == 4.0);
  CHECK(r.bias == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(driver(r, "mean_direct_effect_noncompliers") == 0.5);
  CHECK(driver(r, "odds_noncompliance") == 1.0);
  CHECK(r.identity_holds);

  CHECK(exclusion_sensitivity(p1_with_direct_effect(0.0)).bias == 0.0);
  CHECK(exclusion_sensitivity(p1_with_direct_effect(2.0)).bias ==
        doctest::Approx(2.0 * r.bias).epsilon(1e-14));
}

TEST_CASE("exclusion_sensitivity scope errors") {
  CHECK(code_of([] { exclusion_sensitivity(fixtures::load("P2")); }) ==
        ErrorCode::kUnsupportedScenario);
  const Population p1 = fixtures::load("P1");
  auto units = p1.units();
  units[2].y_of_zd[1][1] += 1.0;  // complier u3
  const Population bad = p1.with_units(units, false);
  CHECK(code_of([&] { exclusion_sensitivity(bad); }) == ErrorCode::kUnsupportedScenario);
}

TEST_CASE("defier_sensitivity on P2") {
  const auto r = defier_sensitivity(fixtures::load("P2"));
  CHECK(driver(r, "lambda") == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(driver(r, "delta_c") == 4.0);
  CHECK(driver(r, "delta_d") == 10.0);
  CHECK(r.biased_estimand == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(r.sign_reversed);
  CHECK(r.identity_holds);
  CHECK(r.drivers[0].first == "lambda");
}

TEST_CASE("defier_sensitivity reductions and errors") {
  const auto none = defier_sensitivity(fixtures::load("P1"));
  CHECK(driver(none, "lambda") == 0.0);
  CHECK(none.biased_estimand == doctest::Approx(driver(none, "delta_c")).epsilon(1e-15));
  CHECK_FALSE(none.sign_reversed);

  const Population equal =
      binary_population({{0, 1, 0, 1}, {0, 1, 0, 3}, {1, 0, 5, 7}, {0, 0, 1, 1}, {1, 1, 2, 2}});
  const auto e = defier_sensitivity(equal);
  CHECK(driver(e, "delta_c") == driver(e, "delta_d"));
  CHECK(std::abs(e.bias) < 1e-14);

  const Population balanced = binary_population({{0, 1, 0, 1}, {1, 0, 0, 3}});
  CHECK(code_of([&] { defier_sensitivity(balanced); }) == ErrorCode::kWeakInstrument);
  CHECK(code_of([] { defier_sensitivity(p1_with_direct_effect(1.0)); }) ==
        ErrorCode::kUnsupportedScenario);
}

TEST_CASE("ols_decomposition") {
  const auto r = ols_decomposition(fixtures::load("P1"));
  CHECK(r.beta_d == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(r.att == 4.5);
  CHECK(r.selection_bias == -0.5);
  const Population random_d =
      binary_population({{1, 1, 0, 2}, {1, 1, 1, 5}, {0, 0, 0, 2}, {0, 0, 1, 5}});
  const auto n = ols_decomposition(random_d);
  CHECK(n.selection_bias == 0.0);
  CHECK(n.beta_d == doctest::Approx(3.0));
  CHECK(n.att == doctest::Approx(oracle::true_basic(random_d, oracle::BasicParameter::kAte)));
}

TEST_CASE("ols_weighted_effect needs tagged scenarios") {
  CHECK(code_of([] { ols_weighted_effect(fixtures::load("P1")); }) ==
        ErrorCode::kUnsupportedScenario);
  const auto r = ols_weighted_effect(make_scenario(battery::additive_linear(4)));
  CHECK(std::abs(r.residual) <= 1e-10);
  CHECK(std::abs(r.mean_w - 1.0) <= 1e-12);
  CHECK(r.min_w >= 0.0);
}

TEST_CASE("misparameterization_experiment") {
  const auto r = misparameterization_experiment(fixtures::load("P3"), 1);
  CHECK(r.recoded_wald == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(r.acr == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(r.ratio == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r.sign_agrees);

  const auto b = misparameterization_experiment(fixtures::load("P1"), 1);
  CHECK(b.recoded_wald == doctest::Approx(b.acr).epsilon(1e-15));

  std::vector<PotentialUnit> units(2);
  for (std::size_t i = 0; i < 2; ++i) {
    units[i].id = "u" + std::to_string(i);
    units[i].d_of_z = {1, 2};
    units[i].y_of_zd = {{0, 1, 2.0 + i}, {0, 1, 2.0 + i}};
  }
  const Population upper({0, 1}, TreatmentSupport::discrete(2), {0.5, 0.5}, units, true);
  CHECK(code_of([&] { misparameterization_experiment(upper, 1); }) == ErrorCode::kWeakInstrument);
  CHECK(code_of([&] { misparameterization_experiment(upper, 3); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("property: recoding a multi-valued treatment inflates the estimate") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Population pop = make_scenario(battery::multi_level(seed, 2, 3));
    const auto r = misparameterization_experiment(pop, 1);
    CHECK(std::abs(r.recoded_wald) >= std::abs(r.acr) * (1.0 - 1e-12));
    CHECK(r.sign_agrees);
  }
}

TEST_CASE("property: sensitivity identities hold across batteries") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto ex = exclusion_sensitivity(make_scenario(battery::direct_effect(seed)));
    CHECK(std::abs(ex.identity_residual) <= 1e-10);
    CHECK(ex.bias == doctest::Approx(ex.biased_estimand - ex.true_late).epsilon(1e-12));
    const auto de = defier_sensitivity(make_scenario(battery::defier_mix(seed)));
    CHECK(std::abs(de.identity_residual) <= 1e-10);
  }
}

TEST_CASE("property: no false crossings on monotone enumerated populations") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ml = monotonicity_check(enumerate_cells(make_scenario(battery::multi_level(seed, 2, 3))));
    CHECK(ml.consistent);
  }
}

TEST_CASE("property: OLS decomposition holds on binary populations") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = ols_decomposition(make_scenario(battery::defier_mix(seed)));
    CHECK(std::abs(r.residual) <= 1e-10);
    const auto w = ols_weighted_effect(make_scenario(battery::additive_linear(seed)));
    CHECK(std::abs(w.residual) <= 1e-10);
    CHECK(std::abs(w.mean_w - 1.0) <= 1e-12);
  }
}
