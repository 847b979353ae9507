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

#include "late/compliers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "format.hpp"
#include "late/error.hpp"

namespace late {

using detail::num;

namespace {

constexpr double kRepairTolerance = 1e-12;

void require_binary(const ObservedSample& s, const char* what) {
  if (s.schema().z_support.size() != 2 || !s.schema().d_support.is_binary()) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + " needs a binary instrument and a binary treatment");
  }
}

struct ArmSums {
  double w[2] = {0.0, 0.0};
  double d[2] = {0.0, 0.0};
};

ArmSums arm_sums(const ObservedSample& s, int cell = -1) {
  ArmSums a;
  const auto zi = s.z_index();
  const auto xc = s.x_cell();
  const auto d = s.d(), w = s.weight();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (cell >= 0 && xc[i] != cell) continue;
    a.w[zi[i]] += w[i];
    a.d[zi[i]] += w[i] * d[i];
  }
  return a;
}

double first_stage(const ObservedSample& s, const ArmSums& a, const std::string& where) {
  for (int k = 0; k < 2; ++k) {
    if (!(a.w[k] > 0.0)) {
      fail(ErrorCode::kConditioning, "instrument arm Z=" + num(s.schema().z_support[k]) +
                                         " is empty" + where);
    }
  }
  return a.d[1] / a.w[1] - a.d[0] / a.w[0];
}

double complier_share(const ObservedSample& s) {
  const double share = first_stage(s, arm_sums(s), "");
  if (!(share > kZeroTolerance)) {
    fail(ErrorCode::kIdentification,
         "estimated complier share " + num(share) + " is not positive");
  }
  return share;
}

}  // namespace

KappaResult kappa(const ObservedSample& s, const std::optional<PzMap>& pz) {
  require_binary(s, "kappa");
  KappaResult r;
  const auto& cells = s.x_cells();
  std::vector<double> p1(cells.size());
  if (pz) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto it = pz->find(cells[c]);
      if (it == pz->end()) {
        fail(ErrorCode::kInvalidArgument, "no instrument probability given for cell " +
                                              s.schema().covariates.describe(cells[c]));
      }
      p1[c] = it->second;
    }
    r.pz = *pz;
  } else {
    std::vector<double> w1(cells.size(), 0.0), wt(cells.size(), 0.0);
    const auto zi = s.z_index();
    const auto xc = s.x_cell();
    const auto w = s.weight();
    for (std::size_t i = 0; i < s.size(); ++i) {
      wt[static_cast<std::size_t>(xc[i])] += w[i];
      if (zi[i] == 1) w1[static_cast<std::size_t>(xc[i])] += w[i];
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      p1[c] = wt[c] > 0.0 ? w1[c] / wt[c] : 0.0;
      r.pz[cells[c]] = p1[c];
    }
    r.flags.push_back("pz_estimated");
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!(p1[c] > 0.0 && p1[c] < 1.0)) {
      fail(ErrorCode::kConditioning, "overlap fails in cell " +
                                         s.schema().covariates.describe(cells[c]) +
                                         ": P(Z=1|X) = " + num(p1[c]));
    }
  }
  const auto zi = s.z_index();
  const auto xc = s.x_cell();
  const auto d = s.d();
  r.kappa.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p = p1[static_cast<std::size_t>(xc[i])];
    const double z = zi[i] == 1 ? 1.0 : 0.0;
    r.kappa[i] = 1.0 - d[i] * (1.0 - z) / (1.0 - p) - (1.0 - d[i]) * z / p;
  }
  return r;
}

double complier_mean(const ObservedSample& s, const RowFunction& g,
                     const std::optional<PzMap>& pz) {
  const KappaResult k = kappa(s, pz);
  const auto y = s.y(), d = s.d(), w = s.weight();
  double sk = 0.0, skg = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sk += w[i] * k.kappa[i];
    skg += w[i] * k.kappa[i] * g(y[i], d[i], s.x_row(i));
  }
  if (!(sk / s.total_weight() > kZeroTolerance)) {
    fail(ErrorCode::kIdentification, "estimated complier share E[kappa] is not positive");
  }
  return skg / sk;
}

double bayes_ratio(const ObservedSample& s, const std::vector<int>& x) {
  require_binary(s, "Bayes ratio");
  const int cell = s.find_x_cell(x);
  const std::string label = s.schema().covariates.describe(x);
  if (cell < 0) fail(ErrorCode::kConditioning, "covariate cell " + label + " is empty");
  const double within = first_stage(s, arm_sums(s, cell), " in cell " + label);
  return within / complier_share(s);
}

StepCurve complier_outcome_cdf(const ObservedSample& s, int arm, std::vector<double> y_grid) {
  require_binary(s, "complier outcome distribution");
  if (arm != 0 && arm != 1) fail(ErrorCode::kInvalidArgument, "arm must be 0 or 1");
  const ArmSums a = arm_sums(s);
  const double share = complier_share(s);

  const auto y = s.y(), d = s.d(), w = s.weight();
  const auto zi = s.z_index();
  if (y_grid.empty()) y_grid.assign(y.begin(), y.end());
  std::sort(y_grid.begin(), y_grid.end());
  y_grid.erase(std::unique(y_grid.begin(), y_grid.end()), y_grid.end());

  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return y[i] < y[j]; });

  // Arm 1 uses treated rows (Z=1 minus Z=0); arm 0 untreated rows (Z=0 minus Z=1).
  const int plus = arm == 1 ? 1 : 0;
  double acc[2] = {0.0, 0.0};
  std::size_t next = 0;
  StepCurve curve;
  bool clipped = false, rearranged = false;
  for (double t : y_grid) {
    while (next < order.size() && y[order[next]] <= t) {
      const std::size_t i = order[next++];
      const double treated = arm == 1 ? d[i] : 1.0 - d[i];
      acc[zi[i]] += w[i] * treated;
    }
    const double f = (acc[plus] / a.w[plus] - acc[1 - plus] / a.w[1 - plus]) / share;
    if (f < -kRepairTolerance || f > 1.0 + kRepairTolerance) clipped = true;
    if (!curve.F.empty() && f < curve.F.back() - kRepairTolerance) rearranged = true;
    curve.y.push_back(t);
    curve.F.push_back(f);
  }
  for (double& f : curve.F) f = std::clamp(f, 0.0, 1.0);
  std::sort(curve.F.begin(), curve.F.end());
  if (clipped) curve.flags.push_back("clipped");
  if (rearranged) curve.flags.push_back("rearranged");
  return curve;
}

double qte(const ObservedSample& s, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) fail(ErrorCode::kInvalidArgument, "tau must lie in (0, 1)");
  return left_inverse(complier_outcome_cdf(s, 1), tau) - left_inverse(complier_outcome_cdf(s, 0), tau);
}

ComplierProfile profile_compliers(const ObservedSample& s) {
  require_binary(s, "complier profile");
  ComplierProfile p;
  p.share = complier_share(s);
  const ArmSums a = arm_sums(s);
  const double treated = (a.d[0] + a.d[1]) / (a.w[0] + a.w[1]);
  const double pz1 = a.w[1] / (a.w[0] + a.w[1]);
  p.share_of_treated = p.share * pz1 / treated;
  for (const auto& cell : s.x_cells()) {
    const std::string label = s.schema().covariates.describe(cell);
    try {
      p.covariate_ratios.emplace_back(label, bayes_ratio(s, cell));
    } catch (const Error&) {
      p.flags.push_back("ratio_undefined:" + label);
    }
  }
  p.outcome_cdf_0 = complier_outcome_cdf(s, 0);
  p.outcome_cdf_1 = complier_outcome_cdf(s, 1);
  for (const auto& f : p.outcome_cdf_0.flags) p.flags.push_back("cdf0_" + f);
  for (const auto& f : p.outcome_cdf_1.flags) p.flags.push_back("cdf1_" + f);
  const KappaResult k = kappa(s);
  const auto w = s.weight();
  double neg = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sum += w[i] * k.kappa[i];
    if (k.kappa[i] < 0.0) neg += w[i];
  }
  p.kappa_mean = sum / s.total_weight();
  p.kappa_negative_fraction = neg / s.total_weight();
  for (const auto& f : k.flags) p.flags.push_back(f);
  return p;
}

}  // namespace late
