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
#include <numeric>
#include <random>

#include "late/battery.hpp"
#include "late/estimators.hpp"
#include "late/fixtures.hpp"
#include "late/oracle.hpp"
#include "late/scenario.hpp"
#include "test_support.hpp"

using namespace late;
using late::testing::code_of;

namespace {

ObservedSample binary_sample(std::vector<double> y, std::vector<double> d, std::vector<double> z) {
  SampleColumns c;
  c.y = std::move(y);
  c.d = std::move(d);
  c.z = std::move(z);
  return ObservedSample(std::move(c), SampleSchema{{0, 1}, TreatmentSupport::discrete(1), {}});
}

bool has_flag(const std::vector<std::string>& flags, const std::string& f) {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

ObservedSample shifted(const ObservedSample& s, double c) {
  SampleColumns cols;
  for (double y : s.y()) cols.y.push_back(y + c);
  cols.d.assign(s.d().begin(), s.d().end());
  cols.z.assign(s.z().begin(), s.z().end());
  cols.x.assign(s.x_codes().begin(), s.x_codes().end());
  if (s.weighted()) cols.weight.assign(s.weight().begin(), s.weight().end());
  return ObservedSample(std::move(cols), s.schema());
}

}  // namespace

TEST_CASE("wald on enumerated fixtures") {
  CHECK(wald(enumerate_cells(fixtures::load("P1"))).point == 4.0);
  CHECK(wald(enumerate_cells(fixtures::load("P2"))).point == -2.0);
  const auto r = wald(enumerate_cells(fixtures::load("P1")));
  REQUIRE(r.first_stage);
  CHECK(*r.first_stage == 0.5);
  CHECK(r.kind == "wald");
}

TEST_CASE("wald with perfect compliance is a difference in means") {
  const auto s = binary_sample({1, 2, 3, 7, 9, 11}, {0, 0, 0, 1, 1, 1}, {0, 0, 0, 1, 1, 1});
  CHECK(wald(s).point == doctest::Approx(7.0));
}

TEST_CASE("wald errors and weak flag") {
  const auto one_arm = binary_sample({1, 2}, {0, 1}, {1, 1});
  CHECK(code_of([&] { wald(one_arm); }) == ErrorCode::kConditioning);
  const auto flat = binary_sample({1, 2, 3, 4}, {0, 1, 0, 1}, {0, 0, 1, 1});
  CHECK(code_of([&] { wald(flat); }) == ErrorCode::kWeakInstrument);
  std::vector<double> y(2000, 0.0), d(2000, 0.0), z(2000, 0.0);
  for (int i = 0; i < 2000; ++i) {
    z[i] = i % 2;
    y[i] = i % 7;
  }
  d[1] = 1;  // first stage 1/1000
  d[3] = 1;
  d[0] = 1;
  const auto r = wald(binary_sample(y, d, z));
  CHECK(has_flag(r.flags, "weak_instrument"));
}

TEST_CASE("iv_g special cases") {
  const auto s1 = enumerate_cells(fixtures::load("P1"));
  CHECK(iv_g(s1).point == doctest::Approx(wald(s1).point).epsilon(1e-14));
  const auto pop = make_scenario(battery::binary_multi_z(42, 3));
  const auto s = enumerate_cells(pop);
  EstimatorOptions prop;
  prop.g = InstrumentFunction::propensity();
  CHECK(iv_g(s, prop).point == doctest::Approx(tsls_saturated(s).point).epsilon(1e-14));
  CHECK(std::abs(iv_g(s).point -
                 oracle::true_iv_combination(pop, InstrumentFunction::identity()).value) < 1e-10);
}

TEST_CASE("iv_g flags instrument functions that disagree with the treatment ranking") {
  const auto s = enumerate_cells(make_scenario(battery::binary_multi_z(42, 3)));
  EstimatorOptions opt;
  opt.g = InstrumentFunction::table({0.0, 2.0, 1.0});
  CHECK(has_flag(iv_g(s, opt).flags, "g_ranking_violation"));
  CHECK_FALSE(has_flag(iv_g(s).flags, "g_ranking_violation"));
  opt.g = InstrumentFunction::table({1.0, 1.0, 1.0});
  CHECK(code_of([&] { iv_g(s, opt); }) == ErrorCode::kWeakInstrument);
}

TEST_CASE("iv_g drops empty instrument cells") {
  const Population pop = make_scenario(battery::binary_multi_z(3, 3));
  const auto full = enumerate_cells(pop);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (full.z()[i] != pop.z_support()[1]) keep.push_back(i);
  }
  const auto r = iv_g(full.take(keep));
  CHECK(r.dropped_cells == std::vector<std::string>{"z=1"});
  CHECK(has_flag(r.flags, "dropped_empty_cells"));
}

TEST_CASE("tsls on P3 and covariate reductions") {
  CHECK(tsls_saturated(enumerate_cells(fixtures::load("P3"))).point == 5.0 / 3.0);
  const auto one = enumerate_cells(make_scenario(battery::multi_level(11, 3, 3, 1)));
  CHECK(tsls_saturated_x(one).point == doctest::Approx(tsls_saturated(one).point).epsilon(1e-12));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pop = make_scenario(battery::multi_level(seed, 3, 2, 2));
    CHECK(std::abs(tsls_saturated_x(enumerate_cells(pop)).point -
                   oracle::true_acr_with_covariates(pop).value) < 1e-10);
  }
}

TEST_CASE("tsls_saturated_x refuses parametric covariate handling") {
  const auto s = enumerate_cells(make_scenario(battery::multi_level(4, 3, 2, 3)));
  EstimatorOptions opt;
  opt.covariates = CovariateSpecification::parse("linear");
  CHECK(code_of([&] { tsls_saturated_x(s, opt); }) == ErrorCode::kNonSaturated);
  opt.covariates = CovariateSpecification::parse("none");
  CHECK(code_of([&] { tsls_saturated_x(s, opt); }) == ErrorCode::kNonSaturated);
  opt.covariates = CovariateSpecification::parse("cells");
  CHECK_NOTHROW(tsls_saturated_x(s, opt));
}

TEST_CASE("tsls_saturated_x reports dropped and flat cells") {
  const Population pop = make_scenario(battery::multi_level(6, 2, 2, 2));
  const auto full = enumerate_cells(pop);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (!(full.z()[i] == 1.0 && full.x_row(i)[0] == 1)) keep.push_back(i);
  }
  const auto r = tsls_saturated_x(full.take(keep));
  CHECK(r.dropped_cells == std::vector<std::string>{"z=1,x=c1"});
  CHECK(has_flag(r.flags, "cells_without_first_stage"));

  std::vector<std::size_t> none;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (full.z()[i] == 0.0) none.push_back(i);
  }
  CHECK(code_of([&] { tsls_saturated_x(full.take(none)); }) == ErrorCode::kEstimation);
}

TEST_CASE("acr_weights_hat") {
  const auto w = acr_weights_hat(enumerate_cells(fixtures::load("P3")));
  CHECK(w.normalized[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w.normalized[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const auto perfect = binary_sample({0, 1, 0, 1}, {0, 1, 0, 1}, {0, 1, 0, 1});
  CHECK(acr_weights_hat(perfect).normalized == std::vector<double>{1.0});

  ScenarioConfig cfg;
  cfg.d_support = TreatmentSupport::discrete(2);
  cfg.profiles = {{"nt", {0, 0}, 0.3, {}, 0.0},
                  {"c", {0, 1}, 0.3, {}, 0.0},
                  {"d", {2, 1}, 0.4, {}, 0.0}};
  const auto crossing = acr_weights_hat(enumerate_cells(make_scenario(cfg)));
  CHECK(crossing.raw[1] == doctest::Approx(-0.4));
  CHECK(has_flag(crossing.flags, "cdf_crossing"));
}

TEST_CASE("itt and ols") {
  const auto s = enumerate_cells(fixtures::load("P1"));
  CHECK(itt_hat(s).point == 2.0);
  CHECK(ols_slope(s).point == doctest::Approx(4.0).epsilon(1e-15));
  const auto flat = binary_sample({3, 3, 3, 3}, {0, 1, 0, 1}, {0, 0, 1, 1});
  CHECK(itt_hat(flat).point == 0.0);
  CHECK(ols_slope(flat).point == 0.0);
}

TEST_CASE("estimator names round-trip") {
  for (auto e : {Estimator::kWald, Estimator::kIvG, Estimator::kTsls, Estimator::kTslsX,
                 Estimator::kItt, Estimator::kOls}) {
    CHECK(parse_estimator(to_string(e)) == e);
  }
  CHECK(code_of([] { parse_estimator("liml"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("bootstrap SE matches the Monte-Carlo spread") {
  const Population p1 = fixtures::load("P1");
  std::vector<double> points;
  for (std::uint64_t r = 0; r < 50; ++r) points.push_back(wald(realize(p1, 10000, 1000 + r)).point);
  const double mean = std::accumulate(points.begin(), points.end(), 0.0) / points.size();
  double ss = 0.0;
  for (double p : points) ss += (p - mean) * (p - mean);
  const double sd = std::sqrt(ss / (points.size() - 1));
  const auto s = realize(p1, 10000, 7);
  const auto b = bootstrap(s, Estimator::kWald, 500, 11);
  CHECK(b.se >= 0.5 * sd);
  CHECK(b.se <= 2.0 * sd);
  CHECK(b.ci[0] < wald(s).point);
  CHECK(b.ci[1] > wald(s).point);
  CHECK(b.replicates == 500);
}

TEST_CASE("bootstrap on degenerate data has zero SE") {
  std::vector<double> y(200, 5.0), d(200), z(200);
  for (int i = 0; i < 200; ++i) d[i] = z[i] = i % 2;
  const auto b = bootstrap(binary_sample(y, d, z), Estimator::kWald, 200, 3);
  CHECK(b.se == 0.0);
  CHECK(b.failed == 0);
}

TEST_CASE("bootstrap is deterministic and schedule independent") {
  const auto s = realize(fixtures::load("P1"), 3000, 5);
  const auto a = bootstrap(s, Estimator::kWald, 300, 17, {}, Execution::kParallel);
  const auto b = bootstrap(s, Estimator::kWald, 300, 17, {}, Execution::kParallel);
  const auto c = bootstrap(s, Estimator::kWald, 300, 17, {}, Execution::kSerial);
  CHECK(a.se == b.se);
  CHECK(a.ci == b.ci);
  CHECK(a.se == c.se);
  CHECK(a.ci == c.ci);
  CHECK(bootstrap(s, Estimator::kWald, 300, 18).se != a.se);
}

TEST_CASE("bootstrap preconditions") {
  const auto s = realize(fixtures::load("P1"), 100, 5);
  CHECK(code_of([&] { bootstrap(s, Estimator::kWald, 99, 1); }) == ErrorCode::kInvalidArgument);
  // With a single Z = 1 row among three, about 30% of replicates lose an arm.
  const auto fragile = binary_sample({1, 2, 3}, {0, 0, 1}, {0, 0, 1});
  CHECK(code_of([&] { bootstrap(fragile, Estimator::kWald, 200, 1); }) == ErrorCode::kInference);
}

TEST_CASE("quantile_type7") {
  CHECK(quantile_type7({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile_type7({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(quantile_type7({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(quantile_type7({10, 20}, 0.25) == 12.5);
}

TEST_CASE("property: ratio estimators are invariant to shifting Y and to row order") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pop = make_scenario(battery::binary_multi_z(seed, 3));
    const auto s = realize(pop, 2000, seed);
    const auto t = shifted(s, 17.5);
    CHECK(iv_g(t).point == doctest::Approx(iv_g(s).point).epsilon(1e-9));
    CHECK(tsls_saturated(t).point == doctest::Approx(tsls_saturated(s).point).epsilon(1e-9));
    std::vector<std::size_t> perm(s.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(iv_g(s.take(perm)).point == doctest::Approx(iv_g(s).point).epsilon(1e-12));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = realize(make_scenario(battery::binary_multi_z(seed, 2)), 2000, seed);
    CHECK(wald(shifted(s, -3.25)).point == doctest::Approx(wald(s).point).epsilon(1e-9));
  }
}

TEST_CASE("property: estimators equal the oracle on enumerated populations") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto bin = make_scenario(battery::binary_multi_z(seed, 2));
    CHECK(std::abs(wald(enumerate_cells(bin)).point - oracle::true_late(bin, 1, 0)) < 1e-10);
    const auto ml = make_scenario(battery::multi_level(seed, 4, 3));
    CHECK(std::abs(tsls_saturated(enumerate_cells(ml)).point -
                   oracle::true_iv_combination(ml, InstrumentFunction::propensity()).value) < 1e-10);
    const auto ml2 = make_scenario(battery::multi_level(seed, 2, 3));
    const auto w = acr_weights_hat(enumerate_cells(ml2));
    const auto acr = oracle::true_acr(ml2, ml2.z_support()[1], ml2.z_support()[0]);
    for (std::size_t j = 0; j < w.normalized.size(); ++j) {
      CHECK(std::abs(w.normalized[j] - acr.weights[j]) < 1e-10);
    }
  }
}

TEST_CASE("property: estimated ACR weights converge at n = 1e5") {
  const Population p3 = fixtures::load("P3");
  const auto w = acr_weights_hat(realize(p3, 100000, 31));
  CHECK(std::abs(w.normalized[0] - 2.0 / 3.0) <= 0.02);
  CHECK(std::abs(w.normalized[1] - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("property: sampled wald is consistent for the LATE") {
  int covered = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const auto pop = make_scenario(battery::binary_multi_z(t, 2));
    const auto s = realize(pop, 10000, 500 + t);
    const auto b = bootstrap(s, Estimator::kWald, 100, 900 + t);
    if (std::abs(wald(s).point - oracle::true_late(pop, 1, 0)) <= 5 * b.se) ++covered;
  }
  CHECK(covered >= 19);
}
