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

#include "late/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "format.hpp"
#include "late/battery.hpp"
#include "late/compliers.hpp"
#include "late/diagnostics.hpp"
#include "late/estimators.hpp"
#include "late/io.hpp"
#include "late/verify.hpp"

namespace late::cli {

using detail::num;
using io::Json;

int exit_code(ErrorCode code) { return 3 + static_cast<int>(code); }

namespace {

struct InputOptions {
  std::string path;
  io::CsvMapping mapping;
  std::string x_columns;
  std::string weight;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.path, "CSV file with a header row")->required();
  cmd->add_option("--y", in.mapping.y, "outcome column")->capture_default_str();
  cmd->add_option("--d", in.mapping.d, "treatment column")->capture_default_str();
  cmd->add_option("--z", in.mapping.z, "instrument column")->capture_default_str();
  cmd->add_option("--x", in.x_columns, "comma-separated covariate columns");
  cmd->add_option("--weight", in.weight, "row weight column");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, "cannot parse '" + text + "' as a number for " + what);
}

ObservedSample load_input(InputOptions& in) {
  in.mapping.x = split_list(in.x_columns);
  if (!in.weight.empty()) in.mapping.weight = in.weight;
  return io::load_csv(in.path, in.mapping);
}

Json describe_sample(const ObservedSample& s) {
  const auto& sup = s.schema().d_support;
  Json d = sup.is_discrete() ? Json{{"levels", sup.max_level + 1}}
                             : Json{{"lo", sup.lo}, {"hi", sup.hi}};
  return Json{{"n", s.size()},
              {"weighted", s.weighted()},
              {"z_support", s.schema().z_support},
              {"d_support", d},
              {"covariates", s.schema().covariates.names}};
}

InstrumentFunction parse_g(const std::string& text) {
  if (text == "identity") return InstrumentFunction::identity();
  if (text == "propensity") return InstrumentFunction::propensity();
  if (text.rfind("table:", 0) == 0) {
    std::vector<double> v;
    for (const auto& item : split_list(text.substr(6))) v.push_back(parse_number(item, "--g"));
    return InstrumentFunction::table(v);
  }
  fail(ErrorCode::kInvalidArgument, "unknown instrument function '" + text +
                                         "' (identity, propensity, table:v1,v2,...)");
}

void emit(const Json& j, const std::string& out_path, bool json, std::ostream& out,
          const std::string& summary) {
  const std::string text = io::dump(j);
  if (!out_path.empty()) io::write_file(out_path, text);
  if (json) {
    out << text;
  } else {
    out << summary;
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string scenario;
  std::string config;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string out;
  std::string population_out;
  bool json = false;
};

int do_simulate(const SimulateOptions& o, std::ostream& out) {
  if (o.scenario.empty() == o.config.empty()) {
    fail(ErrorCode::kInvalidArgument, "give exactly one of --scenario or --config");
  }
  ScenarioConfig cfg;
  if (!o.config.empty()) {
    try {
      cfg = io::scenario_from_json(Json::parse(io::read_file(o.config)));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kParse, "'" + o.config + "' is not valid JSON: " + e.what());
    }
    cfg.seed = o.seed;
  } else {
    cfg = battery::by_name(o.scenario, o.seed);
  }
  const Population pop = make_scenario(cfg);
  const ObservedSample s = o.n == 0 ? enumerate_cells(pop) : realize(pop, o.n, o.seed);
  if (!o.population_out.empty()) io::write_file(o.population_out, io::dump(io::to_json(pop)));
  const std::string csv = io::to_csv(s);
  if (!o.out.empty()) io::write_file(o.out, csv);
  Json summary{{"scenario", cfg.id},
               {"seed", o.seed},
               {"units", pop.units().size()},
               {"rows", s.size()},
               {"enumerated", o.n == 0},
               {"exclusion_holds", pop.exclusion_holds()},
               {"monotonicity_holds", audit_monotonicity(pop).holds}};
  if (o.json) {
    out << io::dump(summary);
  } else if (o.out.empty()) {
    out << csv;
  } else {
    out << "simulated " << s.size() << " rows from " << pop.units().size() << " units ("
        << cfg.id << ", seed " << o.seed << ") -> " << o.out << "\n";
  }
  return 0;
}

struct EstimateOptions {
  InputOptions input;
  std::string estimator = "wald";
  std::string g = "identity";
  std::string covariates = "cells";
  std::size_t bootstrap = 0;
  std::optional<std::uint64_t> seed;
  double weak_threshold = 0.01;
  std::string out;
  bool json = false;
};

int do_estimate(EstimateOptions& o, std::ostream& out) {
  EstimatorOptions eo;
  eo.weak_threshold = o.weak_threshold;
  eo.g = parse_g(o.g);
  eo.covariates = CovariateSpecification::parse(o.covariates);
  const Estimator e = parse_estimator(o.estimator);
  if (o.bootstrap > 0 && !o.seed) fail(ErrorCode::kInvalidArgument, "--bootstrap needs --seed");
  const ObservedSample s = load_input(o.input);
  EstimateReport r = estimate(s, e, eo);
  if (o.bootstrap > 0) {
    const BootstrapResult b = bootstrap(s, e, o.bootstrap, *o.seed, eo);
    r.se = b.se;
    r.ci = b.ci;
    r.replicates = b.replicates;
    r.failed_replicates = b.failed;
  }
  Json j = io::to_json(r);
  j["sample"] = describe_sample(s);
  std::string text = r.kind + " estimate " + fmt(r.point);
  if (r.first_stage) text += "  first stage " + fmt(*r.first_stage);
  if (r.se) text += "  se " + fmt(*r.se) + "  95% ci [" + fmt((*r.ci)[0]) + ", " + fmt((*r.ci)[1]) + "]";
  text += "  n " + std::to_string(r.n);
  for (const auto& f : r.flags) text += "  [" + f + "]";
  emit(j, o.out, o.json, out, text + "\n");
  return 0;
}

struct ProfileOptions {
  InputOptions input;
  std::string out;
  bool json = false;
};

int do_profile(ProfileOptions& o, std::ostream& out) {
  const ObservedSample s = load_input(o.input);
  const ComplierProfile p = profile_compliers(s);
  Json j = io::to_json(p);
  Json q = Json::object();
  for (double tau : {0.25, 0.5, 0.75}) q[num(tau)] = qte(s, tau);
  j["qte"] = q;
  j["sample"] = describe_sample(s);
  std::string text = "complier share " + fmt(p.share) + "  share of treated " +
                     fmt(p.share_of_treated) + "  qte(0.5) " + fmt(q["0.5"].get<double>()) +
                     "  mean kappa " + fmt(p.kappa_mean) + "\n";
  for (const auto& [cell, ratio] : p.covariate_ratios) {
    text += "  ratio " + cell + " " + fmt(ratio) + "\n";
  }
  emit(j, o.out, o.json, out, text);
  return 0;
}

struct DiagnoseOptions {
  InputOptions input;
  double epsilon = 0.0;
  std::size_t bootstrap = 0;
  std::optional<std::uint64_t> seed;
  double weak_threshold = 0.01;
  std::string covariates = "cells";
  std::string out;
  bool json = false;
};

int do_diagnose(DiagnoseOptions& o, std::ostream& out) {
  if (o.bootstrap > 0 && !o.seed) fail(ErrorCode::kInvalidArgument, "--bootstrap needs --seed");
  const ObservedSample s = load_input(o.input);
  MonotonicityResult m;
  if (o.bootstrap > 0) {
    m = monotonicity_check_bootstrap(s, *o.seed, o.bootstrap);
  } else {
    m = monotonicity_check(s, o.epsilon);
  }
  const RelevanceResult r = relevance_check(s, o.weak_threshold);
  const SaturationVerdict v = saturation_check(s, CovariateSpecification::parse(o.covariates));
  Json j{{"monotonicity", io::to_json(m)},
         {"relevance", io::to_json(r)},
         {"saturation", io::to_json(v)},
         {"sample", describe_sample(s)}};
  const std::string text = "monotonicity: " + m.verdict + "\nrelevance: first stage " +
                           fmt(r.first_stage) + (r.pass ? " (pass)" : " (weak)") +
                           "\nsaturation: " + v.verdict + "\n";
  emit(j, o.out, o.json, out, text);
  return 0;
}

struct SensitivityOptions {
  std::string scenario = "defiers";
  std::string sweep;
  std::string population;
  std::uint64_t seed = 1;
  std::string out;
  bool json = false;
};

std::vector<double> parse_sweep(const std::string& text) {
  const auto parts = [&] {
    std::vector<std::string> p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) p.push_back(item);
    return p;
  }();
  if (parts.size() != 3) fail(ErrorCode::kInvalidArgument, "--sweep expects start:stop:count");
  const double a = parse_number(parts[0], "--sweep"), b = parse_number(parts[1], "--sweep");
  const double c = parse_number(parts[2], "--sweep");
  if (!(c >= 1.0) || c != std::floor(c)) {
    fail(ErrorCode::kInvalidArgument, "--sweep count must be a positive integer");
  }
  const auto n = static_cast<std::size_t>(c);
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return v;
}

int do_sensitivity(const SensitivityOptions& o, std::ostream& out) {
  const bool defiers = o.scenario == "defiers";
  if (!defiers && o.scenario != "exclusion") {
    fail(ErrorCode::kInvalidArgument, "--scenario must be 'defiers' or 'exclusion'");
  }
  if (!o.population.empty()) {
    const Population pop = io::load_population(o.population);
    const SensitivityReport r =
        defiers ? defier_sensitivity(pop, o.population) : exclusion_sensitivity(pop, o.population);
    const std::string text = "true LATE " + fmt(r.true_late) + "  Wald " + fmt(r.biased_estimand) +
                             "  bias " + fmt(r.bias) +
                             (r.sign_reversed ? "  [sign_reversed]" : "") + "\n";
    emit(io::to_json(r), o.out, o.json, out, text);
    return 0;
  }
  if (o.sweep.empty()) fail(ErrorCode::kInvalidArgument, "give --sweep or --population");
  std::ostringstream csv;
  if (defiers) {
    csv << "defier_share,lambda,delta_c,delta_d,true_late,wald,bias,sign_reversed,residual\n";
  } else {
    csv << "direct_effect,mean_direct_effect,odds_noncompliance,true_late,wald,bias,product,"
           "residual\n";
  }
  auto f = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (double knob : parse_sweep(o.sweep)) {
    if (defiers) {
      const auto r = defier_sensitivity(make_scenario(battery::defier_share(knob, o.seed)));
      csv << f(knob) << ',' << f(r.drivers[0].second) << ',' << f(r.drivers[1].second) << ','
          << f(r.drivers[2].second) << ',' << f(r.true_late) << ',' << f(r.biased_estimand) << ','
          << f(r.bias) << ',' << (r.sign_reversed ? 1 : 0) << ',' << f(r.identity_residual)
          << '\n';
    } else {
      const auto r = exclusion_sensitivity(make_scenario(battery::direct_effect(o.seed, knob)));
      const double h = r.drivers[0].second, odds = r.drivers[1].second;
      csv << f(knob) << ',' << f(h) << ',' << f(odds) << ',' << f(r.true_late) << ','
          << f(r.biased_estimand) << ',' << f(r.bias) << ',' << f(h * odds) << ','
          << f(r.identity_residual) << '\n';
    }
  }
  if (!o.out.empty()) io::write_file(o.out, csv.str());
  if (o.out.empty() || o.json) out << csv.str();
  return 0;
}

struct VerifyCliOptions {
  std::size_t seeds = 50;
  std::uint64_t seed = 1;
  std::string out;
  bool json = false;
};

int do_verify(const VerifyCliOptions& o, std::ostream& out) {
  VerifyOptions vo;
  vo.seeds = o.seeds;
  vo.seed = o.seed;
  const auto checks = run_verify_suite(vo);
  Json arr = Json::array();
  bool all = true;
  std::ostringstream text;
  for (const auto& c : checks) {
    all = all && c.pass;
    arr.push_back(Json{{"check", c.name},
                       {"statement", c.statement},
                       {"pass", c.pass},
                       {"cases", c.cases},
                       {"max_error", c.max_error},
                       {"detail", c.detail}});
    std::string name = c.name + " ";
    if (name.size() < 44) name.append(44 - name.size(), '.');
    text << name << ' ' << (c.pass ? "PASS" : "FAIL") << "  (" << c.cases
         << " cases, max error " << fmt(c.max_error) << ")";
    if (!c.pass) text << "  " << c.detail;
    text << '\n';
  }
  Json j{{"checks", arr}, {"all_pass", all}};
  emit(j, o.out, o.json, out, text.str());
  return all ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Instrumental-variable identification engine: simulate populations, "
               "estimate complier effects, verify identification equalities"};
  app.name("late");
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "generate a population and a sample");
  c_sim->add_option("--scenario", sim.scenario, "named scenario family");
  c_sim->add_option("--config", sim.config, "scenario config JSON");
  c_sim->add_option("--seed", sim.seed, "64-bit seed")->required();
  c_sim->add_option("--n", sim.n, "rows to draw; 0 writes the enumerated cells");
  c_sim->add_option("--out", sim.out, "sample CSV path");
  c_sim->add_option("--population-out", sim.population_out, "population JSON path");
  c_sim->add_flag("--json", sim.json, "print a JSON summary");

  EstimateOptions est;
  auto* c_est = app.add_subcommand("estimate", "estimate an identified estimand from a CSV");
  add_input_options(c_est, est.input);
  c_est->add_option("--estimator", est.estimator, "wald, iv_g, tsls, tsls_x, itt, ols")
      ->capture_default_str();
  c_est->add_option("--g", est.g, "identity, propensity or table:v1,v2,...")->capture_default_str();
  c_est->add_option("--covariates", est.covariates, "covariate specification for tsls_x")
      ->capture_default_str();
  c_est->add_option("--bootstrap", est.bootstrap, "bootstrap replicates (>= 100)");
  c_est->add_option("--seed", est.seed, "bootstrap seed");
  c_est->add_option("--weak-threshold", est.weak_threshold, "weak first-stage flag threshold")
      ->capture_default_str();
  c_est->add_option("--out", est.out, "report JSON path");
  c_est->add_flag("--json", est.json, "print the report JSON");

  ProfileOptions prof;
  auto* c_prof = app.add_subcommand("profile-compliers", "describe the complier subpopulation");
  add_input_options(c_prof, prof.input);
  c_prof->add_option("--out", prof.out, "report JSON path");
  c_prof->add_flag("--json", prof.json, "print the report JSON");

  DiagnoseOptions diag;
  auto* c_diag = app.add_subcommand("diagnose", "monotonicity, relevance and saturation checks");
  add_input_options(c_diag, diag.input);
  c_diag->add_option("--epsilon", diag.epsilon, "crossing tolerance")->capture_default_str();
  c_diag->add_option("--bootstrap", diag.bootstrap, "calibrate the tolerance by bootstrap");
  c_diag->add_option("--seed", diag.seed, "bootstrap seed");
  c_diag->add_option("--weak-threshold", diag.weak_threshold, "weak first-stage flag threshold")
      ->capture_default_str();
  c_diag->add_option("--covariates", diag.covariates, "covariate specification to check")
      ->capture_default_str();
  c_diag->add_option("--out", diag.out, "report JSON path");
  c_diag->add_flag("--json", diag.json, "print the report JSON");

  SensitivityOptions sens;
  auto* c_sens = app.add_subcommand("sensitivity", "bias from defiers or direct effects");
  c_sens->add_option("--scenario", sens.scenario, "defiers or exclusion")->capture_default_str();
  c_sens->add_option("--sweep", sens.sweep, "start:stop:count over the violation knob");
  c_sens->add_option("--population", sens.population, "population JSON for a single report");
  c_sens->add_option("--seed", sens.seed, "scenario seed")->capture_default_str();
  c_sens->add_option("--out", sens.out, "CSV (sweep) or JSON (single) path");
  c_sens->add_flag("--json", sens.json, "print the output even when --out is given");

  VerifyCliOptions ver;
  auto* c_ver = app.add_subcommand("verify", "run the identification equality suite");
  c_ver->add_option("--seeds", ver.seeds, "scenarios per battery")->capture_default_str();
  c_ver->add_option("--seed", ver.seed, "master seed")->capture_default_str();
  c_ver->add_option("--out", ver.out, "report JSON path");
  c_ver->add_flag("--json", ver.json, "print the report JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_sim->parsed()) return do_simulate(sim, out);
    if (c_est->parsed()) return do_estimate(est, out);
    if (c_prof->parsed()) return do_profile(prof, out);
    if (c_diag->parsed()) return do_diagnose(diag, out);
    if (c_sens->parsed()) return do_sensitivity(sens, out);
    if (c_ver->parsed()) return do_verify(ver, out);
  } catch (const Error& e) {
    err << io::dump(Json{{"error", to_string(e.code())}, {"message", e.what()}}, -1) << '\n';
    return exit_code(e.code());
  }
  return 2;
}

}  // namespace late::cli
