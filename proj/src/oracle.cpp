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

#include "late/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "format.hpp"
#include "late/error.hpp"

namespace late::oracle {

using detail::num;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Variance of the first stage below which a covariate cell carries no
// instrument variation.
constexpr double kThetaFloor = 1e-14;

void require_binary_treatment(const Population& pop, const char* what) {
  if (!pop.d_support().is_binary()) {
    fail(ErrorCode::kUnsupportedScenario, std::string(what) + " needs a binary treatment");
  }
}

void require_binary_instrument(const Population& pop, const char* what) {
  if (pop.num_z() != 2) {
    fail(ErrorCode::kUnsupportedScenario, std::string(what) + " needs a binary instrument");
  }
}

// E[D(z_k)] for every support point.
std::vector<double> mean_treatment(const Population& pop) {
  std::vector<double> out(pop.num_z(), 0.0);
  for (const auto& u : pop.units()) {
    const double m = pop.mass(u);
    for (std::size_t k = 0; k < pop.num_z(); ++k) out[k] += m * u.d_of_z[k];
  }
  return out;
}

bool is_complier(const PotentialUnit& u) { return u.d_of_z[0] == 0.0 && u.d_of_z[1] == 1.0; }

// ---------------------------------------------------------------------------
// Discrete doses.

struct PairAcr {
  double value = kNaN;
  double switch_mass = 0.0;
  double overlap_mass = 0.0;
  std::vector<double> level_mass;    // P(D(hi) >= j > D(lo)), j = 1..J
  std::vector<double> level_effect;  // E[Y(j) - Y(j-1) | ...], NaN if no mass
};

PairAcr pair_acr(const Population& pop, std::size_t hi, std::size_t lo) {
  const int J = pop.d_support().max_level;
  PairAcr r;
  r.level_mass.assign(static_cast<std::size_t>(J), 0.0);
  std::vector<double> effect_sum(static_cast<std::size_t>(J), 0.0);
  for (const auto& u : pop.units()) {
    const double m = pop.mass(u);
    if (m <= 0.0) continue;
    const double dh = u.d_of_z[hi], dl = u.d_of_z[lo];
    if (dh - dl >= 2.0) r.overlap_mass += m;
    for (int j = 1; j <= J; ++j) {
      if (dh >= j && j > dl) {
        r.level_mass[static_cast<std::size_t>(j - 1)] += m;
        effect_sum[static_cast<std::size_t>(j - 1)] += m * pop.level_effect(u, j);
      }
    }
  }
  double total = 0.0;
  double weighted = 0.0;
  r.level_effect.resize(static_cast<std::size_t>(J));
  for (std::size_t j = 0; j < r.level_mass.size(); ++j) {
    total += r.level_mass[j];
    weighted += effect_sum[j];
    r.level_effect[j] = r.level_mass[j] > 0.0 ? effect_sum[j] / r.level_mass[j] : kNaN;
  }
  r.switch_mass = total;
  if (total > 0.0) r.value = weighted / total;
  return r;
}

// ---------------------------------------------------------------------------
// Continuous doses.

struct DoseGrid {
  double lo = 0.0;
  double h = 0.0;
  std::vector<double> nodes;
  // Per unit: central-difference derivative of the instrument-averaged
  // outcome curve at the nodes (one-sided at the ends).
  std::vector<std::vector<double>> slope;
};

DoseGrid build_grid(const Population& pop, int grid_size) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& u : pop.units()) {
    if (u.weight <= 0.0) continue;
    for (double d : u.d_of_z) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  if (!(hi > lo)) {
    fail(ErrorCode::kIdentification, "treatment does not vary; no dose interval to integrate over");
  }
  const int n = grid_size > 0 ? grid_size : pop.d_support().grid_size;
  if (n < 3) fail(ErrorCode::kInvalidArgument, "integration grid needs at least 3 points");
  DoseGrid g;
  g.lo = lo;
  g.h = (hi - lo) / (n - 1);
  g.nodes.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g.nodes[static_cast<std::size_t>(i)] = lo + i * g.h;
  g.nodes.back() = hi;

  g.slope.reserve(pop.units().size());
  std::vector<double> y(static_cast<std::size_t>(n));
  for (const auto& u : pop.units()) {
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = pop.averaged_outcome(u, g.nodes[static_cast<std::size_t>(i)]);
    std::vector<double> s(static_cast<std::size_t>(n));
    s.front() = (y[1] - y[0]) / g.h;
    s.back() = (y[static_cast<std::size_t>(n) - 1] - y[static_cast<std::size_t>(n) - 2]) / g.h;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s[i] = (y[i + 1] - y[i - 1]) / (2.0 * g.h);
    g.slope.push_back(std::move(s));
  }
  return g;
}

std::size_t cell_of(const DoseGrid& g, double t) {
  const double pos = std::floor((t - g.lo) / g.h);
  const std::size_t last = g.nodes.size() - 2;
  if (pos <= 0.0) return 0;
  return std::min(last, static_cast<std::size_t>(pos));
}

// Exact integral over [a, b] of the piecewise-linear interpolant of `v`.
double integrate_interpolant(const DoseGrid& g, const std::vector<double>& v, double a, double b) {
  auto at = [&](double t, std::size_t c) {
    const double frac = (t - g.nodes[c]) / (g.nodes[c + 1] - g.nodes[c]);
    return v[c] + frac * (v[c + 1] - v[c]);
  };
  const std::size_t ca = cell_of(g, a), cb = cell_of(g, b);
  if (ca == cb) return 0.5 * (b - a) * (at(a, ca) + at(b, cb));
  double sum = 0.5 * (g.nodes[ca + 1] - a) * (at(a, ca) + v[ca + 1]);
  for (std::size_t c = ca + 1; c < cb; ++c) {
    sum += 0.5 * (g.nodes[c + 1] - g.nodes[c]) * (v[c] + v[c + 1]);
  }
  sum += 0.5 * (b - g.nodes[cb]) * (v[cb] + at(b, cb));
  return sum;
}

struct PairAmcr {
  double value = kNaN;
  double switch_length = 0.0;  // E[(D(hi) - D(lo)) 1{D(hi) > D(lo)}]
  std::vector<double> cell_weight;
};

PairAmcr pair_amcr(const Population& pop, const DoseGrid& g, std::size_t hi, std::size_t lo,
                   bool with_weights) {
  PairAmcr r;
  double numerator = 0.0;
  if (with_weights) r.cell_weight.assign(g.nodes.size() - 1, 0.0);
  for (std::size_t i = 0; i < pop.units().size(); ++i) {
    const auto& u = pop.units()[i];
    const double m = pop.mass(u);
    const double a = u.d_of_z[lo], b = u.d_of_z[hi];
    if (m <= 0.0 || !(b > a)) continue;
    numerator += m * integrate_interpolant(g, g.slope[i], a, b);
    r.switch_length += m * (b - a);
    if (with_weights) {
      for (std::size_t c = cell_of(g, a); c <= cell_of(g, b); ++c) {
        const double overlap = std::min(b, g.nodes[c + 1]) - std::max(a, g.nodes[c]);
        if (overlap > 0.0) r.cell_weight[c] += m * overlap;
      }
    }
  }
  if (r.switch_length > 0.0) {
    r.value = numerator / r.switch_length;
    for (double& w : r.cell_weight) w /= g.h * r.switch_length;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Instrument ranking.

struct RankedValue {
  std::vector<std::size_t> members;  // support indices merged into this label
  double prob = 0.0;
  double mean_d = 0.0;
  double g = 0.0;
};

std::vector<RankedValue> rank_instrument(const Population& pop, const std::vector<double>& mean_d,
                                         const std::vector<double>& g) {
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < pop.num_z(); ++k) {
    if (pop.z_dist()[k] > 0.0) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_d[a] < mean_d[b]; });
  std::vector<RankedValue> ranked;
  for (std::size_t k : order) {
    const double tol = 1e-12 * std::max(1.0, std::abs(mean_d[k]));
    if (ranked.empty() || std::abs(mean_d[k] - ranked.back().mean_d) > tol) {
      ranked.push_back(RankedValue{{}, 0.0, mean_d[k], 0.0});
    }
    auto& r = ranked.back();
    r.members.push_back(k);
    r.prob += pop.z_dist()[k];
    r.g += pop.z_dist()[k] * g[k];
  }
  for (auto& r : ranked) r.g /= r.prob;

  std::vector<std::string> offending;
  auto pair_label = [&](std::size_t a, std::size_t b) {
    return "z=" + num(pop.z_support()[a]) + ",w=" + num(pop.z_support()[b]);
  };
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const std::size_t rep = ranked[i].members.front();
    for (std::size_t t = 1; t < ranked[i].members.size(); ++t) {
      const std::size_t other = ranked[i].members[t];
      for (const auto& u : pop.units()) {
        if (u.weight > 0.0 && u.d_of_z[other] != u.d_of_z[rep]) {
          offending.push_back(pair_label(other, rep));
          break;
        }
      }
    }
    if (i == 0) continue;
    const std::size_t below = ranked[i - 1].members.front();
    for (const auto& u : pop.units()) {
      if (u.weight > 0.0 && u.d_of_z[rep] < u.d_of_z[below]) {
        offending.push_back(pair_label(rep, below));
        break;
      }
    }
  }
  if (!offending.empty()) {
    std::string msg = "monotonicity fails for instrument pairs:";
    for (const auto& o : offending) msg += " (" + o + ")";
    fail(ErrorCode::kMonotonicity, msg);
  }
  return ranked;
}

bool any_switcher(const Population& pop, std::size_t zi, std::size_t wi) {
  for (const auto& u : pop.units()) {
    if (pop.mass(u) > 0.0 && u.d_of_z[zi] != u.d_of_z[wi]) return true;
  }
  return false;
}

}  // namespace

const char* to_string(BasicParameter p) {
  switch (p) {
    case BasicParameter::kAte: return "ATE";
    case BasicParameter::kAtt: return "ATT";
    case BasicParameter::kItt: return "ITT";
    case BasicParameter::kComplierShare: return "ComplierShare";
    case BasicParameter::kComplierShareOfTreated: return "ComplierShareOfTreated";
  }
  return "unknown";
}

const char* to_string(EstimandForm form) {
  switch (form) {
    case EstimandForm::kWald: return "Wald";
    case EstimandForm::kIvG: return "IV_g";
    case EstimandForm::kTslsSaturated: return "TSLS_sat";
    case EstimandForm::kTslsSaturatedX: return "TSLS_sat_X";
    case EstimandForm::kOls: return "OLS";
  }
  return "unknown";
}

double true_late(const Population& pop, double z, double w) {
  require_binary_treatment(pop, "LATE");
  if (z == w) fail(ErrorCode::kInvalidArgument, "LATE needs two distinct instrument values");
  const std::size_t zi = pop.z_index(z), wi = pop.z_index(w);
  double mass = 0.0, sum = 0.0;
  for (const auto& u : pop.units()) {
    if (u.d_of_z[zi] == u.d_of_z[wi]) continue;
    const double m = pop.mass(u);
    mass += m;
    sum += m * pop.level_effect(u, 1);
  }
  if (!(mass > 0.0)) fail(ErrorCode::kIdentification, "no units induced to switch");
  return sum / mass;
}

double true_basic(const Population& pop, BasicParameter kind) {
  switch (kind) {
    case BasicParameter::kAte: {
      require_binary_treatment(pop, "ATE");
      double sum = 0.0;
      for (const auto& u : pop.units()) sum += pop.mass(u) * pop.level_effect(u, 1);
      return sum;
    }
    case BasicParameter::kAtt: {
      require_binary_treatment(pop, "ATT");
      double treated = 0.0, sum = 0.0;
      for (const auto& u : pop.units()) {
        for (std::size_t k = 0; k < pop.num_z(); ++k) {
          if (u.d_of_z[k] != 1.0) continue;
          const double m = pop.mass(u) * pop.z_dist()[k];
          treated += m;
          sum += m * (pop.outcome(u, k, 1) - pop.outcome(u, k, 0));
        }
      }
      if (!(treated > 0.0)) fail(ErrorCode::kConditioning, "P(D = 1) is zero; ATT undefined");
      return sum / treated;
    }
    case BasicParameter::kItt: {
      require_binary_instrument(pop, "ITT");
      double sum = 0.0;
      for (const auto& u : pop.units()) {
        sum += pop.mass(u) * (pop.realized_outcome(u, 1) - pop.realized_outcome(u, 0));
      }
      return sum;
    }
    case BasicParameter::kComplierShare:
      require_binary_treatment(pop, "complier share");
      return type_masses(pop).complier;
    case BasicParameter::kComplierShareOfTreated: {
      require_binary_treatment(pop, "complier share of treated");
      require_binary_instrument(pop, "complier share of treated");
      double treated = 0.0;
      for (const auto& u : pop.units()) {
        for (std::size_t k = 0; k < 2; ++k) {
          if (u.d_of_z[k] == 1.0) treated += pop.mass(u) * pop.z_dist()[k];
        }
      }
      if (!(treated > 0.0)) fail(ErrorCode::kConditioning, "P(D = 1) is zero");
      return type_masses(pop).complier * pop.z_dist()[1] / treated;
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown parameter");
}

WeightedParameter true_acr(const Population& pop, double z, double w) {
  if (!pop.d_support().is_discrete()) {
    fail(ErrorCode::kUnsupportedScenario, "ACR needs a discrete treatment");
  }
  if (z == w) fail(ErrorCode::kInvalidArgument, "ACR needs two distinct instrument values");
  const std::size_t zi = pop.z_index(z), wi = pop.z_index(w);
  if (!any_switcher(pop, zi, wi)) fail(ErrorCode::kIdentification, "no units induced to switch");
  const auto md = mean_treatment(pop);
  if (!(md[zi] > md[wi])) {
    fail(ErrorCode::kInvalidArgument, "instrument pair not ranked: E[D | Z = " + num(z) +
                                          "] must exceed E[D | Z = " + num(w) + "]");
  }
  const PairAcr r = pair_acr(pop, zi, wi);
  if (!(r.switch_mass > 0.0)) fail(ErrorCode::kIdentification, "no units induced to switch");
  WeightedParameter out;
  out.kind = "ACR";
  out.value = r.value;
  out.overlap_mass = r.overlap_mass;
  out.components = r.level_effect;
  for (std::size_t j = 0; j < r.level_mass.size(); ++j) {
    out.weights.push_back(r.level_mass[j] / r.switch_mass);
    out.support.push_back(static_cast<double>(j + 1));
  }
  out.preconditions_checked = {"discrete treatment", "instrument pair ranked by E[D|Z]",
                               "positive switching mass"};
  return out;
}

WeightedParameter true_iv_combination(const Population& pop, const InstrumentFunction& g) {
  const auto md = mean_treatment(pop);
  const auto gv = g.evaluate(pop.z_support(), md);
  const auto ranked = rank_instrument(pop, md, gv);
  if (ranked.size() < 2) {
    fail(ErrorCode::kIdentification, "instrument does not shift mean treatment");
  }
  double g_bar = 0.0;
  for (const auto& r : ranked) g_bar += r.prob * r.g;

  const bool continuous = pop.d_support().is_continuous();
  DoseGrid grid;
  if (continuous) grid = build_grid(pop, 0);

  WeightedParameter out;
  out.kind = continuous ? "AMCR_g" : (pop.d_support().is_binary() ? "LATE_g" : "ACR_g");
  std::vector<double> raw;
  double cov = 0.0;
  for (std::size_t k = 1; k < ranked.size(); ++k) {
    double tail = 0.0;
    for (std::size_t l = k; l < ranked.size(); ++l) tail += ranked[l].prob * (ranked[l].g - g_bar);
    const double lambda = (ranked[k].mean_d - ranked[k - 1].mean_d) * tail;
    const std::size_t hi = ranked[k].members.front(), lo = ranked[k - 1].members.front();
    const double effect = continuous ? pair_amcr(pop, grid, hi, lo, false).value
                                     : pair_acr(pop, hi, lo).value;
    raw.push_back(lambda);
    cov += lambda;
    out.components.push_back(effect);
    out.support.push_back(pop.z_support()[hi]);
  }
  if (std::abs(cov) <= kZeroTolerance) {
    fail(ErrorCode::kWeakInstrument, "Cov(D, g(Z)) is zero");
  }
  double value = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out.weights.push_back(raw[k] / cov);
    value += raw[k] / cov * out.components[k];
  }
  out.value = value;
  out.preconditions_checked = {"instrument ranked by E[D|Z] (ties merged)",
                               "monotonicity across adjacent values", "Cov(D, g(Z)) != 0"};
  return out;
}

CovariateCombination true_acr_with_covariates(const Population& pop) {
  std::map<std::vector<int>, std::vector<PotentialUnit>> by_cell;
  for (const auto& u : pop.units()) {
    if (u.weight > 0.0) by_cell[u.x].push_back(u);
  }
  CovariateCombination out;
  double num_sum = 0.0, den_sum = 0.0;
  for (auto& [cell, units] : by_cell) {
    double cell_weight = 0.0;
    for (const auto& u : units) cell_weight += u.weight;
    const Population sub = pop.with_units(std::move(units), pop.exclusion_holds());
    const auto md = mean_treatment(sub);
    double mean = 0.0;
    for (std::size_t k = 0; k < sub.num_z(); ++k) mean += sub.z_dist()[k] * md[k];
    double theta = 0.0;
    for (std::size_t k = 0; k < sub.num_z(); ++k) {
      theta += sub.z_dist()[k] * (md[k] - mean) * (md[k] - mean);
    }
    if (theta <= kThetaFloor) theta = 0.0;
    const double mass = cell_weight / pop.total_weight();
    double value = kNaN;
    if (theta > 0.0) {
      value = true_iv_combination(sub, InstrumentFunction::propensity()).value;
      num_sum += mass * theta * value;
      den_sum += mass * theta;
    }
    out.cells.push_back(cell);
    out.cell_mass.push_back(mass);
    out.theta.push_back(theta);
    out.cell_value.push_back(value);
  }
  if (!(den_sum > 0.0)) {
    fail(ErrorCode::kIdentification, "no covariate cell has instrument variation");
  }
  out.value = num_sum / den_sum;
  out.preconditions_checked = {"finite covariate support", "per-cell ranking and monotonicity",
                               "at least one cell with Theta > 0"};
  return out;
}

WeightedParameter true_amcr(const Population& pop, double z, double w, int grid_size) {
  if (!pop.d_support().is_continuous()) {
    fail(ErrorCode::kUnsupportedScenario, "marginal causal response needs a continuous treatment");
  }
  if (z == w) fail(ErrorCode::kInvalidArgument, "AMCR needs two distinct instrument values");
  const std::size_t zi = pop.z_index(z), wi = pop.z_index(w);
  if (!any_switcher(pop, zi, wi)) fail(ErrorCode::kIdentification, "no units induced to switch");
  const auto md = mean_treatment(pop);
  if (!(md[zi] > md[wi])) {
    fail(ErrorCode::kInvalidArgument, "instrument pair not ranked: E[D | Z = " + num(z) +
                                          "] must exceed E[D | Z = " + num(w) + "]");
  }
  const DoseGrid grid = build_grid(pop, grid_size);
  PairAmcr r = pair_amcr(pop, grid, zi, wi, true);
  if (!(r.switch_length > 0.0)) {
    fail(ErrorCode::kIdentification, "no switching mass at any dose");
  }
  WeightedParameter out;
  out.kind = "AMCR";
  out.value = r.value;
  out.weights = std::move(r.cell_weight);
  out.cell_width = grid.h;
  for (std::size_t c = 0; c + 1 < grid.nodes.size(); ++c) {
    out.support.push_back(0.5 * (grid.nodes[c] + grid.nodes[c + 1]));
  }
  out.preconditions_checked = {"continuous treatment", "instrument pair ranked by E[D|Z]",
                               "positive switching length"};
  return out;
}

StepCurve true_complier_outcome(const Population& pop, int arm) {
  require_binary_treatment(pop, "complier outcome distribution");
  require_binary_instrument(pop, "complier outcome distribution");
  if (arm != 0 && arm != 1) fail(ErrorCode::kInvalidArgument, "arm must be 0 or 1");
  std::vector<std::pair<double, double>> values;
  double total = 0.0;
  for (const auto& u : pop.units()) {
    const double m = pop.mass(u);
    if (m <= 0.0 || !is_complier(u)) continue;
    values.emplace_back(pop.averaged_outcome(u, arm), m);
    total += m;
  }
  if (!(total > 0.0)) fail(ErrorCode::kIdentification, "no compliers");
  std::sort(values.begin(), values.end());
  StepCurve curve;
  double run = 0.0;
  for (const auto& [y, m] : values) {
    run += m;
    if (!curve.y.empty() && curve.y.back() == y) {
      curve.F.back() = run / total;
    } else {
      curve.y.push_back(y);
      curve.F.push_back(run / total);
    }
  }
  curve.F.back() = 1.0;
  return curve;
}

double true_qte(const Population& pop, double tau) {
  const StepCurve treated = true_complier_outcome(pop, 1);
  const StepCurve untreated = true_complier_outcome(pop, 0);
  return left_inverse(treated, tau) - left_inverse(untreated, tau);
}

double true_complier_mean(const Population& pop, const RowFunction& g) {
  require_binary_treatment(pop, "complier mean");
  require_binary_instrument(pop, "complier mean");
  double total = 0.0, sum = 0.0;
  for (const auto& u : pop.units()) {
    const double m = pop.mass(u);
    if (m <= 0.0 || !is_complier(u)) continue;
    total += m;
    for (std::size_t k = 0; k < 2; ++k) {
      sum += m * pop.z_dist()[k] * g(pop.realized_outcome(u, k), u.d_of_z[k], u.x);
    }
  }
  if (!(total > 0.0)) fail(ErrorCode::kIdentification, "no compliers");
  return sum / total;
}

// ---------------------------------------------------------------------------
// Observable estimands from the exact cell law.

namespace {

struct CellLaw {
  std::vector<double> y, d, w;
  std::vector<std::size_t> zk;
  std::vector<std::vector<int>> x;
};

CellLaw cell_law(const Population& pop) {
  CellLaw law;
  for (const auto& u : pop.units()) {
    for (std::size_t k = 0; k < pop.num_z(); ++k) {
      // Raw weights: every estimand below is a ratio, and unnormalized sums
      // stay exact for integer-weighted populations.
      const double m = u.weight * pop.z_dist()[k];
      if (!(m > 0.0)) continue;
      law.y.push_back(pop.realized_outcome(u, k));
      law.d.push_back(u.d_of_z[k]);
      law.w.push_back(m);
      law.zk.push_back(k);
      law.x.push_back(u.x);
    }
  }
  return law;
}

double weighted_cov(const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>& w) {
  double sw = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    sa += w[i] * a[i];
    sb += w[i] * b[i];
  }
  const double ma = sa / sw, mb = sb / sw;
  double c = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) c += w[i] * (a[i] - ma) * (b[i] - mb);
  return c / sw;
}

std::vector<double> arm_means(const CellLaw& law, const std::vector<double>& v, std::size_t K) {
  std::vector<double> mass(K, 0.0), sum(K, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    mass[law.zk[i]] += law.w[i];
    sum[law.zk[i]] += law.w[i] * v[i];
  }
  for (std::size_t k = 0; k < K; ++k) sum[k] = mass[k] > 0.0 ? sum[k] / mass[k] : 0.0;
  return sum;
}

double covariance_ratio(const CellLaw& law, const std::vector<double>& g_per_z) {
  std::vector<double> g(law.y.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = g_per_z[law.zk[i]];
  const double den = weighted_cov(law.d, g, law.w);
  if (std::abs(den) <= kZeroTolerance) fail(ErrorCode::kWeakInstrument, "Cov(D, g(Z)) is zero");
  return weighted_cov(law.y, g, law.w) / den;
}

// Second stage of saturated TSLS with covariate-cell fixed effects, solved
// from the weighted normal equations of Y on [E[D|Z,X], cell dummies].
double tsls_cells_normal_equations(const CellLaw& law) {
  std::map<std::vector<int>, std::size_t> xcell;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> zx;  // mass, sum d
  for (std::size_t i = 0; i < law.y.size(); ++i) xcell.emplace(law.x[i], 0);
  std::size_t next = 0;
  for (auto& [k, v] : xcell) v = next++;
  for (std::size_t i = 0; i < law.y.size(); ++i) {
    auto& acc = zx[{law.zk[i], xcell.at(law.x[i])}];
    acc.first += law.w[i];
    acc.second += law.w[i] * law.d[i];
  }
  const Eigen::Index n = static_cast<Eigen::Index>(law.y.size());
  const Eigen::Index p = 1 + static_cast<Eigen::Index>(xcell.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, p);
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const std::size_t c = xcell.at(law.x[ui]);
    const auto& acc = zx.at({law.zk[ui], c});
    const double sw = std::sqrt(law.w[ui]);
    X(i, 0) = sw * acc.second / acc.first;
    X(i, 1 + static_cast<Eigen::Index>(c)) = sw;
    yv(i) = sw * law.y[ui];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    fail(ErrorCode::kEstimation,
         "second stage is rank deficient: the fitted treatment does not vary within any "
         "covariate cell");
  }
  const Eigen::VectorXd beta = qr.solve(yv);
  return beta(0);
}

}  // namespace

double population_estimand(const Population& pop, EstimandForm form, const InstrumentFunction& g) {
  const CellLaw law = cell_law(pop);
  const std::size_t K = pop.num_z();
  switch (form) {
    case EstimandForm::kWald: {
      require_binary_instrument(pop, "Wald estimand");
      double w[2] = {0.0, 0.0}, sy[2] = {0.0, 0.0}, sd[2] = {0.0, 0.0};
      for (std::size_t i = 0; i < law.y.size(); ++i) {
        w[law.zk[i]] += law.w[i];
        sy[law.zk[i]] += law.w[i] * law.y[i];
        sd[law.zk[i]] += law.w[i] * law.d[i];
      }
      if (!(w[0] > 0.0 && w[1] > 0.0)) {
        fail(ErrorCode::kConditioning, "an instrument arm has zero probability");
      }
      // Cross-multiplied difference of arm means.
      const double den = sd[1] * w[0] - sd[0] * w[1];
      if (std::abs(den / (w[0] * w[1])) <= kZeroTolerance) {
        fail(ErrorCode::kWeakInstrument, "zero first stage");
      }
      return (sy[1] * w[0] - sy[0] * w[1]) / den;
    }
    case EstimandForm::kIvG: {
      const auto md = arm_means(law, law.d, K);
      return covariance_ratio(law, g.evaluate(pop.z_support(), md));
    }
    case EstimandForm::kTslsSaturated:
      return covariance_ratio(law, arm_means(law, law.d, K));
    case EstimandForm::kTslsSaturatedX:
      return tsls_cells_normal_equations(law);
    case EstimandForm::kOls: {
      const double var = weighted_cov(law.d, law.d, law.w);
      if (var <= kZeroTolerance) fail(ErrorCode::kConditioning, "treatment does not vary");
      return weighted_cov(law.y, law.d, law.w) / var;
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown estimand");
}

}  // namespace late::oracle
