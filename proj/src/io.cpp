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

#include "late/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "format.hpp"
#include "late/error.hpp"

namespace late::io {

using detail::num;

namespace {

void write_float(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void dump_into(std::string& out, const Json& j, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        dump_into(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(),
                                     [](const Json& e) { return e.is_structured(); });
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += flat && pretty ? ", " : ",";
        if (!flat) newline(depth + 1);
        dump_into(out, j[i], indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      write_float(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

[[noreturn]] void parse_error(const std::string& what) { fail(ErrorCode::kParse, what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) parse_error(where + ": missing field '" + key + "'");
  return j.at(key);
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + ": expected a number");
  return j.get<double>();
}

std::vector<double> as_doubles(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(as_double(e, where));
  return out;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json support_to_json(const TreatmentSupport& s) {
  if (s.is_discrete()) {
    Json levels = Json::array();
    for (int j = 0; j <= s.max_level; ++j) levels.push_back(j);
    return levels;
  }
  return Json{{"lo", s.lo}, {"hi", s.hi}, {"grid_size", s.grid_size}};
}

TreatmentSupport support_from_json(const Json& j, const std::string& where) {
  if (j.is_array()) {
    const auto levels = as_doubles(j, where);
    if (levels.size() < 2) parse_error(where + ": need at least two treatment levels");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (levels[k] != static_cast<double>(k)) {
        parse_error(where + ": discrete treatment levels must be 0, 1, ..., J");
      }
    }
    return TreatmentSupport::discrete(static_cast<int>(levels.size()) - 1);
  }
  if (j.is_object()) {
    const double lo = as_double(field(j, "lo", where), where);
    const double hi = as_double(field(j, "hi", where), where);
    const int grid = j.contains("grid_size") ? j.at("grid_size").get<int>() : 513;
    return TreatmentSupport::continuous(lo, hi, grid);
  }
  parse_error(where + ": expected a list of levels or {lo, hi, grid_size}");
}

Json covariates_to_json(const CovariateSchema& c) {
  return Json{{"names", c.names}, {"labels", c.labels}};
}

CovariateSchema covariates_from_json(const Json& j) {
  CovariateSchema c;
  c.names = j.at("names").get<std::vector<std::string>>();
  c.labels = j.at("labels").get<std::vector<std::vector<std::string>>>();
  return c;
}

Json curve_to_json(const OutcomeCurve& c) {
  return Json{{"poly", c.poly}, {"sine_amplitude", c.sine_amplitude},
              {"sine_frequency", c.sine_frequency}};
}

OutcomeCurve curve_from_json(const Json& j, const std::string& where) {
  OutcomeCurve c;
  c.poly = as_doubles(field(j, "poly", where), where);
  if (j.contains("sine_amplitude")) c.sine_amplitude = as_double(j.at("sine_amplitude"), where);
  if (j.contains("sine_frequency")) c.sine_frequency = as_double(j.at("sine_frequency"), where);
  return c;
}

template <typename Fn>
auto wrap_json_errors(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    parse_error(where + ": " + e.what());
  }
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_into(out, j, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(ErrorCode::kIo, "failed writing '" + path + "'");
}

Json to_json(const Population& pop) {
  Json j;
  j["z_support"] = pop.z_support();
  j["d_support"] = support_to_json(pop.d_support());
  j["z_dist"] = pop.z_dist();
  j["exclusion_holds"] = pop.exclusion_holds();
  if (!pop.covariates().empty()) j["covariates"] = covariates_to_json(pop.covariates());
  if (!pop.assumptions().empty()) j["assumptions"] = pop.assumptions();
  Json units = Json::array();
  for (const auto& u : pop.units()) {
    Json ju;
    ju["id"] = u.id;
    ju["weight"] = u.weight;
    ju["d_of_z"] = u.d_of_z;
    if (pop.d_support().is_discrete()) {
      ju["y_of_zd"] = u.y_of_zd;
    } else {
      Json curves = Json::array();
      for (const auto& c : u.y_curve) curves.push_back(curve_to_json(c));
      ju["y_curve"] = curves;
    }
    ju["x"] = u.x;
    units.push_back(std::move(ju));
  }
  j["units"] = std::move(units);
  return j;
}

Population population_from_json(const Json& j) {
  return wrap_json_errors("population", [&] {
    const std::string where = "population";
    const auto z_support = as_doubles(field(j, "z_support", where), where + ".z_support");
    const auto d_support = support_from_json(field(j, "d_support", where), where + ".d_support");
    const auto z_dist = as_doubles(field(j, "z_dist", where), where + ".z_dist");
    const bool exclusion = field(j, "exclusion_holds", where).get<bool>();
    CovariateSchema covariates;
    if (j.contains("covariates")) covariates = covariates_from_json(j.at("covariates"));
    std::vector<std::string> assumptions;
    if (j.contains("assumptions")) assumptions = j.at("assumptions").get<std::vector<std::string>>();
    std::vector<PotentialUnit> units;
    std::size_t index = 0;
    for (const auto& ju : field(j, "units", where)) {
      const std::string uw = where + ".units[" + std::to_string(index++) + "]";
      PotentialUnit u;
      const Json& id = field(ju, "id", uw);
      u.id = id.is_string() ? id.get<std::string>() : id.dump();
      u.weight = ju.contains("weight") ? as_double(ju.at("weight"), uw + ".weight") : 1.0;
      u.d_of_z = as_doubles(field(ju, "d_of_z", uw), uw + ".d_of_z");
      if (d_support.is_discrete()) {
        for (const auto& row : field(ju, "y_of_zd", uw)) {
          u.y_of_zd.push_back(as_doubles(row, uw + ".y_of_zd"));
        }
      } else {
        for (const auto& c : field(ju, "y_curve", uw)) {
          u.y_curve.push_back(curve_from_json(c, uw + ".y_curve"));
        }
      }
      if (ju.contains("x")) u.x = ju.at("x").get<std::vector<int>>();
      units.push_back(std::move(u));
    }
    return Population(z_support, d_support, z_dist, std::move(units), exclusion,
                       std::move(covariates), std::move(assumptions));
  });
}

Population load_population(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    parse_error("'" + path + "' is not valid JSON: " + e.what());
  }
  return population_from_json(j);
}

Json to_json(const ScenarioConfig& cfg) {
  Json j;
  j["id"] = cfg.id;
  j["z_support"] = cfg.z_support;
  j["z_dist"] = cfg.z_dist;
  j["d_support"] = support_to_json(cfg.d_support);
  j["n_units"] = cfg.n_units;
  if (cfg.type_shares) {
    const auto& t = *cfg.type_shares;
    j["type_shares"] = Json{{"never_taker", t.never_taker},
                            {"complier", t.complier},
                            {"defier", t.defier},
                            {"always_taker", t.always_taker}};
  }
  if (!cfg.profiles.empty()) {
    Json ps = Json::array();
    for (const auto& p : cfg.profiles) {
      ps.push_back(Json{{"label", p.label},
                        {"d_of_z", p.d_of_z},
                        {"share", p.share},
                        {"x_probs", p.x_probs},
                        {"effect_shift", p.effect_shift}});
    }
    j["profiles"] = ps;
  }
  const auto& o = cfg.outcome;
  j["outcome"] = Json{{"baseline_mean", o.baseline_mean}, {"baseline_sd", o.baseline_sd},
                      {"effect_lo", o.effect_lo},         {"effect_hi", o.effect_hi},
                      {"curvature", o.curvature},         {"cubic", o.cubic},
                      {"sine_amplitude", o.sine_amplitude},
                      {"sine_frequency", o.sine_frequency},
                      {"dose_jitter", o.dose_jitter}};
  j["direct_effect"] = cfg.direct_effect;
  j["direct_effect_sd"] = cfg.direct_effect_sd;
  if (!cfg.covariates.empty()) j["covariates"] = covariates_to_json(cfg.covariates);
  if (!cfg.x_effect.empty()) j["x_effect"] = cfg.x_effect;
  j["additive_linear"] = cfg.additive_linear;
  j["seed"] = cfg.seed;
  return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kConfig, "scenario config must be a JSON object");
  static const std::set<std::string> known = {
      "id",      "z_support",        "z_dist",     "d_support", "n_units",
      "type_shares", "profiles",     "outcome",    "direct_effect", "direct_effect_sd",
      "covariates",  "x_effect",     "additive_linear", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) fail(ErrorCode::kConfig, "unknown scenario key '" + it.key() + "'");
  }
  try {
    ScenarioConfig cfg;
    if (j.contains("id")) cfg.id = j.at("id").get<std::string>();
    if (j.contains("z_support")) cfg.z_support = j.at("z_support").get<std::vector<double>>();
    if (j.contains("z_dist")) cfg.z_dist = j.at("z_dist").get<std::vector<double>>();
    if (j.contains("d_support")) cfg.d_support = support_from_json(j.at("d_support"), "d_support");
    if (j.contains("n_units")) cfg.n_units = j.at("n_units").get<std::size_t>();
    if (j.contains("type_shares")) {
      const Json& t = j.at("type_shares");
      cfg.type_shares = TypeShares{t.value("never_taker", 0.0), t.value("complier", 0.0),
                                   t.value("defier", 0.0), t.value("always_taker", 0.0)};
    }
    if (j.contains("profiles")) {
      for (const auto& p : j.at("profiles")) {
        ComplianceProfile cp;
        cp.label = p.value("label", std::string("profile"));
        cp.d_of_z = p.at("d_of_z").get<std::vector<double>>();
        cp.share = p.at("share").get<double>();
        cp.x_probs = p.value("x_probs", std::vector<double>{});
        cp.effect_shift = p.value("effect_shift", 0.0);
        cfg.profiles.push_back(std::move(cp));
      }
    }
    if (j.contains("outcome")) {
      const Json& o = j.at("outcome");
      auto& m = cfg.outcome;
      m.baseline_mean = o.value("baseline_mean", m.baseline_mean);
      m.baseline_sd = o.value("baseline_sd", m.baseline_sd);
      m.effect_lo = o.value("effect_lo", m.effect_lo);
      m.effect_hi = o.value("effect_hi", m.effect_hi);
      m.curvature = o.value("curvature", m.curvature);
      m.cubic = o.value("cubic", m.cubic);
      m.sine_amplitude = o.value("sine_amplitude", m.sine_amplitude);
      m.sine_frequency = o.value("sine_frequency", m.sine_frequency);
      m.dose_jitter = o.value("dose_jitter", m.dose_jitter);
    }
    cfg.direct_effect = j.value("direct_effect", 0.0);
    cfg.direct_effect_sd = j.value("direct_effect_sd", 0.0);
    if (j.contains("covariates")) cfg.covariates = covariates_from_json(j.at("covariates"));
    if (j.contains("x_effect")) cfg.x_effect = j.at("x_effect").get<std::vector<double>>();
    cfg.additive_linear = j.value("additive_linear", false);
    cfg.seed = j.value("seed", std::uint64_t{0});
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("scenario config: ") + e.what());
  }
}

Json to_json(const EstimateReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["point"] = r.point;
  j["first_stage"] = optional_number(r.first_stage);
  j["weights_hat"] = r.weights_hat;
  j["se"] = optional_number(r.se);
  j["ci"] = r.ci ? Json{(*r.ci)[0], (*r.ci)[1]} : Json(nullptr);
  j["n"] = r.n;
  j["flags"] = r.flags;
  j["dropped_cells"] = r.dropped_cells;
  if (r.replicates > 0) {
    j["replicates"] = r.replicates;
    j["failed_replicates"] = r.failed_replicates;
  }
  return j;
}

Json to_json(const AcrWeights& w) {
  return Json{{"raw", w.raw}, {"normalized", w.normalized}, {"flags", w.flags}};
}

Json to_json(const oracle::WeightedParameter& p) {
  Json j;
  j["kind"] = p.kind;
  j["value"] = p.value;
  j["weights"] = p.weights;
  j["components"] = p.components;
  j["support"] = p.support;
  j["overlap_mass"] = p.overlap_mass;
  if (p.cell_width > 0.0) j["cell_width"] = p.cell_width;
  j["preconditions_checked"] = p.preconditions_checked;
  return j;
}

Json to_json(const oracle::CovariateCombination& c) {
  Json cells = Json::array();
  for (std::size_t i = 0; i < c.cells.size(); ++i) {
    cells.push_back(Json{{"x", c.cells[i]},
                         {"mass", c.cell_mass[i]},
                         {"theta", c.theta[i]},
                         {"value", c.cell_value[i]}});
  }
  return Json{{"kind", "ACR_Z_given_X"},
              {"value", c.value},
              {"cells", cells},
              {"preconditions_checked", c.preconditions_checked}};
}

Json to_json(const StepCurve& c) {
  return Json{{"y", c.y}, {"F", c.F}, {"flags", c.flags}};
}

Json to_json(const ComplierProfile& p) {
  Json ratios = Json::object();
  for (const auto& [k, v] : p.covariate_ratios) ratios[k] = v;
  return Json{{"share", p.share},
              {"share_of_treated", p.share_of_treated},
              {"covariate_ratios", ratios},
              {"outcome_cdf_0", to_json(p.outcome_cdf_0)},
              {"outcome_cdf_1", to_json(p.outcome_cdf_1)},
              {"kappa_diagnostics",
               Json{{"mean", p.kappa_mean}, {"negative_fraction", p.kappa_negative_fraction}}},
              {"flags", p.flags}};
}

Json to_json(const MonotonicityResult& m) {
  return Json{{"differences", m.differences},
              {"epsilon", m.epsilon},
              {"crossing_levels", m.crossing_levels},
              {"consistent", m.consistent},
              {"verdict", m.verdict}};
}

Json to_json(const RelevanceResult& r) {
  return Json{{"first_stage", r.first_stage}, {"pass", r.pass}, {"flags", r.flags}};
}

Json to_json(const SaturationVerdict& v) {
  return Json{{"pass", v.pass}, {"verdict", v.verdict}, {"reason", v.reason}, {"flags", v.flags}};
}

Json to_json(const SensitivityReport& r) {
  Json drivers = Json::object();
  for (const auto& [k, v] : r.drivers) drivers[k] = v;
  return Json{{"scenario_id", r.scenario_id},
              {"true_late", r.true_late},
              {"biased_estimand", r.biased_estimand},
              {"bias", r.bias},
              {"drivers", drivers},
              {"sign_reversed", r.sign_reversed},
              {"identity_residual", r.identity_residual},
              {"identity_holds", r.identity_holds}};
}

Json to_json(const OlsDecomposition& r) {
  return Json{{"beta_d", r.beta_d},
              {"att", r.att},
              {"selection_bias", r.selection_bias},
              {"residual", r.residual}};
}

Json to_json(const WeightedEffect& r) {
  return Json{{"beta_d", r.beta_d},
              {"weighted_effect", r.weighted_effect},
              {"mean_w", r.mean_w},
              {"min_w", r.min_w},
              {"max_w", r.max_w},
              {"residual", r.residual}};
}

Json to_json(const MisparameterizationRecord& r) {
  return Json{{"threshold", r.threshold},
              {"recoded_wald", r.recoded_wald},
              {"acr", r.acr},
              {"ratio", r.ratio},
              {"sign_agrees", r.sign_agrees}};
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name,
                   const std::string& source) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    fail(ErrorCode::kParse, source + ": column '" + name + "' not found in the header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

ObservedSample parse_csv(std::istream& in, const CsvMapping& mapping, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(ErrorCode::kParse, source + ": empty file, no header row");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line = line.substr(3);
  const auto header = split(line);
  const std::size_t cy = column(header, mapping.y, source);
  const std::size_t cd = column(header, mapping.d, source);
  const std::size_t cz = column(header, mapping.z, source);
  std::vector<std::size_t> cx;
  for (const auto& name : mapping.x) cx.push_back(column(header, name, source));
  std::optional<std::size_t> cw;
  if (mapping.weight) cw = column(header, *mapping.weight, source);

  SampleColumns cols;
  std::vector<std::vector<std::string>> labels_raw(cx.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++row;
    const std::string where =
        source + ": data row " + std::to_string(row) + " (line " + std::to_string(line_no) + ")";
    const auto cells = split(line);
    auto cell = [&](std::size_t c, const std::string& name) -> const std::string& {
      if (c >= cells.size() || cells[c].empty()) {
        fail(ErrorCode::kParse, where + ": missing value in column '" + name + "'");
      }
      return cells[c];
    };
    auto number = [&](std::size_t c, const std::string& name) {
      const std::string& text = cell(c, name);
      double v = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        fail(ErrorCode::kParse,
             where + ": cannot parse '" + text + "' in column '" + name + "' as a number");
      }
      return v;
    };
    cols.y.push_back(number(cy, mapping.y));
    cols.d.push_back(number(cd, mapping.d));
    cols.z.push_back(number(cz, mapping.z));
    for (std::size_t k = 0; k < cx.size(); ++k) labels_raw[k].push_back(cell(cx[k], mapping.x[k]));
    if (cw) cols.weight.push_back(number(*cw, *mapping.weight));
  }
  if (row == 0) fail(ErrorCode::kParse, source + ": no data rows");

  SampleSchema schema;
  if (mapping.z_support) {
    schema.z_support = *mapping.z_support;
    for (std::size_t i = 0; i < cols.z.size(); ++i) {
      if (!std::binary_search(schema.z_support.begin(), schema.z_support.end(), cols.z[i])) {
        fail(ErrorCode::kParse, source + ": data row " + std::to_string(i + 1) +
                                    ": instrument value " + num(cols.z[i]) +
                                    " outside the declared support");
      }
    }
  } else {
    schema.z_support = cols.z;
    std::sort(schema.z_support.begin(), schema.z_support.end());
    schema.z_support.erase(std::unique(schema.z_support.begin(), schema.z_support.end()),
                           schema.z_support.end());
  }
  if (mapping.d_support) {
    schema.d_support = *mapping.d_support;
  } else {
    const bool levels = std::all_of(cols.d.begin(), cols.d.end(),
                                    [](double d) { return d >= 0.0 && d == std::floor(d); });
    const auto [lo, hi] = std::minmax_element(cols.d.begin(), cols.d.end());
    schema.d_support = levels ? TreatmentSupport::discrete(std::max(1, static_cast<int>(*hi)))
                              : TreatmentSupport::continuous(*lo, *hi);
  }
  schema.covariates.names = mapping.x;
  for (std::size_t k = 0; k < cx.size(); ++k) {
    std::vector<std::string> labels = labels_raw[k];
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    schema.covariates.labels.push_back(labels);
  }
  cols.x.resize(row * cx.size());
  for (std::size_t i = 0; i < row; ++i) {
    for (std::size_t k = 0; k < cx.size(); ++k) {
      cols.x[i * cx.size() + k] = schema.covariates.code_of(k, labels_raw[k][i]);
    }
  }
  return ObservedSample(std::move(cols), std::move(schema));
}

ObservedSample load_csv(const std::string& path, const CsvMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return parse_csv(in, mapping, path);
}

void write_csv(const ObservedSample& s, std::ostream& out) {
  const auto& cov = s.schema().covariates;
  out << "y,d,z";
  for (const auto& n : cov.names) out << ',' << n;
  if (s.weighted()) out << ",weight";
  out << '\n';
  auto f = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << f(s.y()[i]) << ',' << f(s.d()[i]) << ',' << f(s.z()[i]);
    const auto x = s.x_row(i);
    for (std::size_t k = 0; k < x.size(); ++k) {
      out << ',' << cov.labels[k][static_cast<std::size_t>(x[k])];
    }
    if (s.weighted()) out << ',' << f(s.weight()[i]);
    out << '\n';
  }
}

std::string to_csv(const ObservedSample& s) {
  std::ostringstream ss;
  write_csv(s, ss);
  return ss.str();
}

}  // namespace late::io
