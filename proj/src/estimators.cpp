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

#include "late/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "format.hpp"
#include "late/diagnostics.hpp"
#include "late/error.hpp"
#include "late/kernels.hpp"
#include "late/random.hpp"

namespace late {

using detail::num;
using kernels::Moments;

namespace {

// Weights rescaled so the largest is one: ratios are unchanged, and cells of
// equal mass (enumerated populations) then sum exactly.
std::vector<Moments> z_moments(const ObservedSample& s) {
  const std::size_t K = s.schema().z_support.size();
  if (!s.weighted()) return kernels::cell_moments(s.z_index(), s.y(), s.d(), s.weight(), K);
  const auto w = s.weight();
  const double top = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
  if (!(top > 0.0)) return kernels::cell_moments(s.z_index(), s.y(), s.d(), w, K);
  std::vector<double> scaled(w.begin(), w.end());
  for (double& v : scaled) v /= top;
  return kernels::cell_moments(s.z_index(), s.y(), s.d(), scaled, K);
}

void require_binary_instrument(const ObservedSample& s, const char* what) {
  if (s.schema().z_support.size() != 2) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + " needs a binary instrument");
  }
}

void require_arms(const ObservedSample& s, const std::vector<Moments>& m) {
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k].w > 0.0)) {
      fail(ErrorCode::kConditioning,
           "instrument arm Z=" + num(s.schema().z_support[k]) + " has no observations");
    }
  }
}

void weak_guard(double first_stage, const EstimatorOptions& opt, EstimateReport& r,
                const char* what) {
  if (!(std::abs(first_stage) > kZeroTolerance)) {
    fail(ErrorCode::kWeakInstrument, std::string(what) + " is zero; the instrument is irrelevant");
  }
  if (std::abs(first_stage) < opt.weak_threshold) r.flags.push_back("weak_instrument");
}

// Covariance of cell means across instrument cells: sum_k p_k (a_k - a)(b_k - b).
double cell_cov(const std::vector<double>& p, const std::vector<double>& a,
                const std::vector<double>& b) {
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    ma += p[k] * a[k];
    mb += p[k] * b[k];
  }
  double c = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) c += p[k] * (a[k] - ma) * (b[k] - mb);
  return c;
}

struct ZCells {
  std::vector<std::size_t> index;  // support positions with mass
  std::vector<double> p, my, md, g;
};

ZCells nonempty_cells(const ObservedSample& s, const std::vector<Moments>& m) {
  ZCells c;
  double total = 0.0;
  for (const auto& mk : m) total += mk.w;
  if (!(total > 0.0)) fail(ErrorCode::kConditioning, "sample has zero total weight");
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k].w > 0.0)) continue;
    c.index.push_back(k);
    c.p.push_back(m[k].w / total);
    c.my.push_back(m[k].mean_y());
    c.md.push_back(m[k].mean_d());
  }
  (void)s;
  return c;
}

EstimateReport covariance_ratio(const ObservedSample& s, const EstimatorOptions& opt,
                                const InstrumentFunction& g, const char* kind) {
  EstimateReport r;
  r.kind = kind;
  r.n = s.size();
  const auto m = z_moments(s);
  ZCells c = nonempty_cells(s, m);
  const auto& zs = s.schema().z_support;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    if (!(m[k].w > 0.0)) r.dropped_cells.push_back("z=" + num(zs[k]));
  }
  if (!r.dropped_cells.empty()) r.flags.push_back("dropped_empty_cells");
  std::vector<double> mean_all(zs.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < c.index.size(); ++i) mean_all[c.index[i]] = c.md[i];
  const auto g_all = g.evaluate(zs, mean_all);
  for (std::size_t k : c.index) c.g.push_back(g_all[k]);

  const double den = cell_cov(c.p, c.md, c.g);
  if (!(std::abs(den) > kZeroTolerance)) {
    fail(ErrorCode::kWeakInstrument, "Cov(D, g(Z)) is zero; the instrument is irrelevant");
  }
  r.point = cell_cov(c.p, c.my, c.g) / den;
  const auto [lo, hi] = std::minmax_element(c.md.begin(), c.md.end());
  r.first_stage = *hi - *lo;
  if (*r.first_stage < opt.weak_threshold) r.flags.push_back("weak_instrument");

  // g must order instrument values the same way as the treatment means.
  for (std::size_t a = 0; a < c.index.size(); ++a) {
    for (std::size_t b = 0; b < c.index.size(); ++b) {
      if (c.md[a] < c.md[b] && c.g[a] > c.g[b]) {
        if (std::find(r.flags.begin(), r.flags.end(), "g_ranking_violation") == r.flags.end()) {
          r.flags.push_back("g_ranking_violation");
        }
      }
    }
  }
  return r;
}

}  // namespace

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::kWald: return "wald";
    case Estimator::kIvG: return "iv_g";
    case Estimator::kTsls: return "tsls";
    case Estimator::kTslsX: return "tsls_x";
    case Estimator::kItt: return "itt";
    case Estimator::kOls: return "ols";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  for (Estimator e : {Estimator::kWald, Estimator::kIvG, Estimator::kTsls, Estimator::kTslsX,
                      Estimator::kItt, Estimator::kOls}) {
    if (name == to_string(e)) return e;
  }
  fail(ErrorCode::kInvalidArgument,
       "unknown estimator '" + name + "' (wald, iv_g, tsls, tsls_x, itt, ols)");
}

EstimateReport wald(const ObservedSample& s, const EstimatorOptions& opt) {
  require_binary_instrument(s, "wald");
  const auto m = z_moments(s);
  require_arms(s, m);
  EstimateReport r;
  r.kind = "wald";
  r.n = s.size();
  const double fs = m[1].mean_d() - m[0].mean_d();
  r.first_stage = fs;
  weak_guard(fs, opt, r, "first stage");
  // Cross-multiplied difference of arm means.
  r.point = (m[1].wy * m[0].w - m[0].wy * m[1].w) / (m[1].wd * m[0].w - m[0].wd * m[1].w);
  return r;
}

EstimateReport iv_g(const ObservedSample& s, const EstimatorOptions& opt) {
  return covariance_ratio(s, opt, opt.g, "iv_g");
}

EstimateReport tsls_saturated(const ObservedSample& s, const EstimatorOptions& opt) {
  return covariance_ratio(s, opt, InstrumentFunction::propensity(), "tsls");
}

EstimateReport tsls_saturated_x(const ObservedSample& s, const EstimatorOptions& opt) {
  const SaturationVerdict verdict = saturation_check(s, opt.covariates);
  if (!verdict.pass) {
    fail(ErrorCode::kNonSaturated, "covariate specification '" + opt.covariates.describe() +
                                       "' refused: " + verdict.reason);
  }
  EstimateReport r;
  r.kind = "tsls_x";
  r.n = s.size();
  const std::size_t K = s.schema().z_support.size();
  const std::size_t X = s.x_cells().size();
  std::vector<int> cell(s.size());
  const auto zi = s.z_index();
  const auto xi = s.x_cell();
  for (std::size_t i = 0; i < s.size(); ++i) {
    cell[i] = xi[i] * static_cast<int>(K) + zi[i];
  }
  const auto m = kernels::cell_moments(cell, s.y(), s.d(), s.weight(), K * X);
  const double total = s.total_weight();
  if (!(total > 0.0)) fail(ErrorCode::kConditioning, "sample has zero total weight");

  double num_sum = 0.0, den_sum = 0.0, max_spread = 0.0;
  std::vector<std::string> flat_cells;
  for (std::size_t x = 0; x < X; ++x) {
    std::vector<double> p, my, md;
    double wx = 0.0;
    for (std::size_t k = 0; k < K; ++k) wx += m[x * K + k].w;
    const std::string label = s.schema().covariates.describe(s.x_cells()[x]);
    if (!(wx > 0.0)) continue;
    for (std::size_t k = 0; k < K; ++k) {
      const Moments& c = m[x * K + k];
      if (!(c.w > 0.0)) {
        r.dropped_cells.push_back("z=" + num(s.schema().z_support[k]) + "," + label);
        continue;
      }
      p.push_back(c.w / wx);
      my.push_back(c.mean_y());
      md.push_back(c.mean_d());
    }
    const double var = cell_cov(p, md, md);
    const auto [lo, hi] = std::minmax_element(md.begin(), md.end());
    max_spread = std::max(max_spread, *hi - *lo);
    if (var <= kZeroTolerance) flat_cells.push_back(label);
    num_sum += wx / total * cell_cov(p, my, md);
    den_sum += wx / total * var;
  }
  if (!r.dropped_cells.empty()) r.flags.push_back("dropped_empty_cells");
  if (!(den_sum > kZeroTolerance)) {
    std::string cells;
    for (const auto& c : flat_cells) cells += " [" + c + "]";
    fail(ErrorCode::kEstimation,
         "second stage is rank deficient: fitted treatment is collinear with the covariate "
         "cell indicators in" + cells);
  }
  if (!flat_cells.empty()) r.flags.push_back("cells_without_first_stage");
  r.point = num_sum / den_sum;
  r.first_stage = max_spread;
  if (max_spread < opt.weak_threshold) r.flags.push_back("weak_instrument");
  return r;
}

EstimateReport itt_hat(const ObservedSample& s, const EstimatorOptions&) {
  require_binary_instrument(s, "itt");
  const auto m = z_moments(s);
  require_arms(s, m);
  EstimateReport r;
  r.kind = "itt";
  r.n = s.size();
  r.point = m[1].mean_y() - m[0].mean_y();
  return r;
}

EstimateReport ols_slope(const ObservedSample& s, const EstimatorOptions&) {
  const std::vector<int> one(s.size(), 0);
  const auto m = kernels::cell_moments(one, s.y(), s.d(), s.weight(), 1);
  if (!(m[0].w > 0.0)) fail(ErrorCode::kConditioning, "sample has zero total weight");
  const double my = m[0].mean_y(), md = m[0].mean_d();
  double syd = 0.0, sdd = 0.0;
  const auto y = s.y(), d = s.d(), w = s.weight();
  for (std::size_t i = 0; i < s.size(); ++i) {
    syd += w[i] * (y[i] - my) * (d[i] - md);
    sdd += w[i] * (d[i] - md) * (d[i] - md);
  }
  if (!(sdd / m[0].w > kZeroTolerance)) {
    fail(ErrorCode::kConditioning, "treatment does not vary; OLS slope undefined");
  }
  EstimateReport r;
  r.kind = "ols";
  r.n = s.size();
  r.point = syd / sdd;
  return r;
}

EstimateReport estimate(const ObservedSample& s, Estimator e, const EstimatorOptions& opt) {
  switch (e) {
    case Estimator::kWald: return wald(s, opt);
    case Estimator::kIvG: return iv_g(s, opt);
    case Estimator::kTsls: return tsls_saturated(s, opt);
    case Estimator::kTslsX: return tsls_saturated_x(s, opt);
    case Estimator::kItt: return itt_hat(s, opt);
    case Estimator::kOls: return ols_slope(s, opt);
  }
  fail(ErrorCode::kInvalidArgument, "unknown estimator");
}

AcrWeights acr_weights_hat(const ObservedSample& s) {
  require_binary_instrument(s, "ACR weight estimation");
  const auto& sup = s.schema().d_support;
  if (!sup.is_discrete()) fail(ErrorCode::kInvalidArgument, "ACR weights need a discrete treatment");
  const auto J = static_cast<std::size_t>(sup.max_level);
  // at_least[k][j] = weight of rows in arm k with D >= j.
  std::vector<std::vector<double>> at_least(2, std::vector<double>(J + 1, 0.0));
  std::array<double, 2> arm{0.0, 0.0};
  const auto zi = s.z_index();
  const auto d = s.d(), w = s.weight();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto k = static_cast<std::size_t>(zi[i]);
    arm[k] += w[i];
    at_least[k][static_cast<std::size_t>(d[i])] += w[i];
  }
  for (std::size_t k = 0; k < 2; ++k) {
    if (!(arm[k] > 0.0)) {
      fail(ErrorCode::kConditioning,
           "instrument arm Z=" + num(s.schema().z_support[k]) + " has no observations");
    }
    for (std::size_t j = J; j-- > 0;) at_least[k][j] += at_least[k][j + 1];
  }
  AcrWeights out;
  double total = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double diff = at_least[1][j] / arm[1] - at_least[0][j] / arm[0];
    out.raw.push_back(diff);
    total += diff;
    if (diff < -kZeroTolerance) {
      if (out.flags.empty()) out.flags.push_back("cdf_crossing");
    }
  }
  if (std::abs(total) > kZeroTolerance) {
    for (double v : out.raw) out.normalized.push_back(v / total);
  } else {
    out.flags.push_back("zero_first_stage");
  }
  return out;
}

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BootstrapDraws bootstrap_draws(const ObservedSample& s, const VectorStatistic& stat,
                               std::size_t B, std::uint64_t seed, Execution exec) {
  if (B < 100) fail(ErrorCode::kInvalidArgument, "bootstrap needs at least 100 replicates");
  if (s.size() == 0) fail(ErrorCode::kInvalidArgument, "cannot resample an empty sample");
  BootstrapDraws out;
  out.values.resize(B);
  std::vector<char> failed(B, 0);
  const std::size_t n = s.size();
  auto body = [&](std::size_t b) {
    try {
      Rng rng(derive_seed(seed, b));
      std::vector<std::size_t> rows(n);
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
      out.values[b] = stat(s.take(rows));
    } catch (const Error&) {
      failed[b] = 1;
      out.values[b].clear();
    }
  };
  if (exec == Execution::kParallel) {
    kernels::for_each_index(B, body);
  } else {
    kernels::for_each_index_serial(B, body);
  }
  out.failed = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  return out;
}

BootstrapResult bootstrap_statistic(const ObservedSample& s,
                                    const std::function<double(const ObservedSample&)>& stat,
                                    std::size_t B, std::uint64_t seed, Execution exec) {
  const auto draws = bootstrap_draws(
      s, [&](const ObservedSample& r) { return std::vector<double>{stat(r)}; }, B, seed, exec);
  if (static_cast<double>(draws.failed) > 0.2 * static_cast<double>(B)) {
    fail(ErrorCode::kInference, std::to_string(draws.failed) + " of " + std::to_string(B) +
                                    " bootstrap replicates failed; the sample is too fragile");
  }
  std::vector<double> v;
  for (const auto& d : draws.values) {
    if (!d.empty()) v.push_back(d[0]);
  }
  BootstrapResult r;
  r.replicates = B;
  r.failed = draws.failed;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  r.se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  r.ci = {quantile_type7(v, 0.025), quantile_type7(v, 0.975)};
  return r;
}

BootstrapResult bootstrap(const ObservedSample& s, Estimator e, std::size_t B,
                          std::uint64_t seed, const EstimatorOptions& opt, Execution exec) {
  return bootstrap_statistic(
      s, [&](const ObservedSample& r) { return estimate(r, e, opt).point; }, B, seed, exec);
}

}  // namespace late
