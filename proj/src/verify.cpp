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

#include "late/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "late/battery.hpp"
#include "late/compliers.hpp"
#include "late/diagnostics.hpp"
#include "late/error.hpp"
#include "late/estimators.hpp"
#include "late/fixtures.hpp"
#include "late/oracle.hpp"
#include "late/random.hpp"

namespace late {

namespace {

using oracle::EstimandForm;

// Accumulates discrepancies for one check; any exception fails the check.
class Tally {
 public:
  explicit Tally(double tol) : tol_(tol) {}

  void equal(double got, double want, const std::string& what) {
    const double err = std::abs(got - want);
    ++cases_;
    if (!(err <= tol_)) note(what + ": " + std::to_string(got) + " vs " + std::to_string(want));
    max_error_ = std::max(max_error_, std::isfinite(err) ? err : INFINITY);
  }
  void require(bool ok, const std::string& what) {
    ++cases_;
    if (!ok) note(what);
  }
  void note(const std::string& what) {
    ok_ = false;
    if (detail_.empty()) detail_ = what;
  }

  VerifyCheck finish(std::string name, std::string statement) const {
    VerifyCheck c;
    c.name = std::move(name);
    c.statement = std::move(statement);
    c.pass = ok_;
    c.max_error = max_error_;
    c.cases = cases_;
    c.detail = ok_ ? "" : detail_;
    return c;
  }

 private:
  double tol_;
  bool ok_ = true;
  double max_error_ = 0.0;
  std::size_t cases_ = 0;
  std::string detail_;
};

VerifyCheck guarded(const std::string& name, const std::string& statement, double tol,
                    const std::function<void(Tally&)>& body) {
  Tally t(tol);
  try {
    body(t);
  } catch (const Error& e) {
    t.note(std::string(to_string(e.code())) + ": " + e.what());
  }
  return t.finish(name, statement);
}

void convex(Tally& t, const std::vector<double>& w, double scale, const std::string& what) {
  double sum = 0.0;
  for (double v : w) {
    t.require(v >= -1e-12, what + ": negative weight");
    sum += v * scale;
  }
  t.equal(sum, 1.0, what + ": weights sum");
}

}  // namespace

std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& opt) {
  const Population p1 = fixtures::load("P1");
  const Population p2 = fixtures::load("P2");
  const Population p3 = fixtures::load("P3");
  auto seed_of = [&](std::size_t i) { return derive_seed(opt.seed, i); };
  std::vector<VerifyCheck> out;

  out.push_back(guarded(
      "wald_equals_late", "Wald estimand equals the complier average effect (binary Z, D)",
      1e-12, [&](Tally& t) {
        t.equal(wald(enumerate_cells(p1)).point, 4.0, "P1 wald");
        t.equal(oracle::true_late(p1, 1, 0), 4.0, "P1 true LATE");
        t.equal(oracle::population_estimand(p2, EstimandForm::kWald), -2.0, "P2 wald");
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const Population pop = make_scenario(battery::binary_multi_z(seed_of(i), 2));
          t.equal(wald(enumerate_cells(pop)).point, oracle::true_late(pop, 1, 0), "battery");
        }
      }));

  out.push_back(guarded(
      "iv_multi_instrument_late_combination",
      "Cov(Y,g(Z))/Cov(D,g(Z)) equals the lambda-weighted adjacent LATEs", 1e-10, [&](Tally& t) {
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const int K = 2 + static_cast<int>(i % 3);
          const Population pop = make_scenario(battery::binary_multi_z(seed_of(i), K));
          for (const auto& g : {InstrumentFunction::identity(), InstrumentFunction::propensity()}) {
            const auto truth = oracle::true_iv_combination(pop, g);
            EstimatorOptions eo;
            eo.g = g;
            t.equal(iv_g(enumerate_cells(pop), eo).point, truth.value, "iv_g");
            t.equal(oracle::population_estimand(pop, EstimandForm::kIvG, g), truth.value,
                    "population IV");
            convex(t, truth.weights, 1.0, "lambda");
          }
        }
      }));

  out.push_back(guarded(
      "acr_binary_instrument", "Wald estimand equals the omega-weighted average causal response",
      1e-10, [&](Tally& t) {
        const auto acr = oracle::true_acr(p3, 1, 0);
        t.equal(acr.value, 5.0 / 3.0, "P3 ACR");
        t.equal(acr.weights.at(0), 2.0 / 3.0, "P3 omega_1");
        t.equal(acr.weights.at(1), 1.0 / 3.0, "P3 omega_2");
        t.equal(wald(enumerate_cells(p3)).point, 5.0 / 3.0, "P3 wald");
        const auto w = acr_weights_hat(enumerate_cells(p3));
        t.equal(w.normalized.at(0), 2.0 / 3.0, "P3 omega_hat_1");
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const Population pop = make_scenario(battery::multi_level(seed_of(i), 2, 3));
          const auto truth = oracle::true_acr(pop, 1, 0);
          t.equal(wald(enumerate_cells(pop)).point, truth.value, "battery wald");
          convex(t, truth.weights, 1.0, "omega");
        }
      }));

  out.push_back(guarded(
      "acr_multi_instrument_combination",
      "IV estimand with a multi-valued instrument equals the mu-weighted ACRs", 1e-10,
      [&](Tally& t) {
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const Population pop =
              make_scenario(battery::multi_level(seed_of(i), 3 + static_cast<int>(i % 2), 2));
          const auto truth = oracle::true_iv_combination(pop, InstrumentFunction::propensity());
          t.equal(tsls_saturated(enumerate_cells(pop)).point, truth.value, "tsls");
          convex(t, truth.weights, 1.0, "mu");
        }
      }));

  out.push_back(guarded(
      "tsls_covariate_cells_theta_weighting",
      "Saturated TSLS with covariate cells equals the Theta(X)-weighted ACRs", 1e-10,
      [&](Tally& t) {
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const Population pop =
              make_scenario(battery::multi_level(seed_of(i), 3, 2, 2 + static_cast<int>(i % 2)));
          const auto truth = oracle::true_acr_with_covariates(pop);
          t.equal(tsls_saturated_x(enumerate_cells(pop)).point, truth.value, "tsls_x");
          t.equal(oracle::population_estimand(pop, EstimandForm::kTslsSaturatedX), truth.value,
                  "normal equations");
        }
        EstimatorOptions linear;
        linear.covariates = CovariateSpecification::parse("linear");
        const Population pop = make_scenario(battery::multi_level(opt.seed, 3, 2, 3));
        try {
          tsls_saturated_x(enumerate_cells(pop), linear);
          t.note("linear covariate specification was not refused");
        } catch (const Error& e) {
          t.require(e.code() == ErrorCode::kNonSaturated, "refusal code");
        }
      }));

  out.push_back(guarded(
      "amcr_continuous_dose",
      "IV estimand with continuous doses equals the integrated marginal response", 1e-4,
      [&](Tally& t) {
        const std::size_t n = std::min<std::size_t>(opt.seeds, 10);
        for (std::size_t i = 0; i < n; ++i) {
          const Population smooth = make_scenario(battery::continuous(seed_of(i), 3, true));
          const auto truth = oracle::true_iv_combination(smooth, InstrumentFunction::propensity());
          t.equal(oracle::population_estimand(smooth, EstimandForm::kTslsSaturated), truth.value,
                  "smooth");
          const auto pair = oracle::true_amcr(smooth, 2, 0);
          convex(t, pair.weights, pair.cell_width, "omega(d)");
          const Population linear = make_scenario(battery::continuous(seed_of(i), 2, false, 1.5));
          const double slope = oracle::true_amcr(linear, 1, 0).value;
          t.require(std::abs(slope - 1.5) <= 1e-10, "linear outcome slope");
        }
      }));

  out.push_back(guarded(
      "defier_bias_decomposition",
      "Wald estimand equals (1+lambda) delta_C - lambda delta_D with defiers", 1e-10,
      [&](Tally& t) {
        const auto r = defier_sensitivity(p2);
        t.equal(r.biased_estimand, -2.0, "P2 estimand");
        t.equal(r.drivers.at(0).second, 1.0, "P2 lambda");
        t.require(r.sign_reversed, "P2 sign reversal");
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const auto s = defier_sensitivity(make_scenario(battery::defier_mix(seed_of(i))));
          t.equal(s.identity_residual, 0.0, "battery");
        }
      }));

  out.push_back(guarded(
      "exclusion_bias_product",
      "Wald bias from direct effects equals E[H|NC] times the odds of noncompliance", 1e-10,
      [&](Tally& t) {
        auto units = p1.units();
        units[0].y_of_zd[1] = {units[0].y_of_zd[0][0] + 1.0, units[0].y_of_zd[0][1] + 1.0};
        const auto r = exclusion_sensitivity(p1.with_units(units, false));
        t.equal(r.bias, 0.5, "P1 with H=1 on u1");
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const auto s = exclusion_sensitivity(make_scenario(battery::direct_effect(seed_of(i))));
          t.equal(s.identity_residual, 0.0, "battery");
        }
      }));

  out.push_back(guarded(
      "kappa_complier_means", "kappa-weighted means equal complier means", 1e-10, [&](Tally& t) {
        const auto cells = enumerate_cells(p1);
        t.equal(complier_mean(cells, [](double y, double, std::span<const int>) { return y; }),
                3.0, "P1 E[Y|C]");
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const Population pop = make_scenario(battery::defier_share(0.0, seed_of(i)));
          const auto s = enumerate_cells(pop);
          Rng rng(seed_of(i));
          const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
          const RowFunction g = [&](double y, double d, std::span<const int>) {
            return a * y + b * d * y;
          };
          t.equal(complier_mean(s, g), oracle::true_complier_mean(pop, g), "battery");
        }
      }));

  out.push_back(guarded(
      "complier_distributions_and_qte",
      "Indicator Wald ratios recover complier outcome distributions and quantile effects", 1e-10,
      [&](Tally& t) {
        const auto cells = enumerate_cells(p1);
        t.equal(qte(cells, 0.5), 4.0, "P1 QTE(0.5)");
        t.equal(qte(cells, 0.5), oracle::true_qte(p1, 0.5), "P1 oracle QTE");
        for (int arm = 0; arm <= 1; ++arm) {
          const auto est = complier_outcome_cdf(cells, arm);
          const auto truth = oracle::true_complier_outcome(p1, arm);
          for (std::size_t k = 0; k < est.y.size(); ++k) {
            t.equal(est.F[k], truth(est.y[k]), "P1 CDF");
          }
        }
      }));

  out.push_back(guarded(
      "ols_decomposition_and_weighted_effect",
      "OLS slope equals ATT plus selection bias, and E[W Delta] under AS and L", 1e-10,
      [&](Tally& t) {
        const auto d = ols_decomposition(p1);
        t.equal(d.beta_d, 4.0, "P1 beta_D");
        t.equal(d.att, 4.5, "P1 ATT");
        t.equal(d.selection_bias, -0.5, "P1 B");
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const auto w = ols_weighted_effect(make_scenario(battery::additive_linear(seed_of(i))));
          t.equal(w.residual, 0.0, "weighted effect");
          t.equal(w.mean_w, 1.0, "E[W]");
        }
      }));

  out.push_back(guarded(
      "monotonicity_implication",
      "Treatment CDFs by instrument arm do not cross under monotonicity", 0.0, [&](Tally& t) {
        t.require(monotonicity_check(enumerate_cells(p3)).consistent, "P3");
        for (std::size_t i = 0; i < opt.seeds; ++i) {
          const Population pop = make_scenario(battery::multi_level(seed_of(i), 2, 3));
          t.require(monotonicity_check(enumerate_cells(pop)).consistent, "valid population");
          const Population bad = make_scenario(battery::defier_share(0.6, seed_of(i)));
          t.require(!monotonicity_check(enumerate_cells(bad)).consistent, "defier share 0.6");
        }
      }));

  return out;
}

}  // namespace late
