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

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "late/compliers.hpp"
#include "late/diagnostics.hpp"
#include "late/estimators.hpp"
#include "late/oracle.hpp"
#include "late/population.hpp"
#include "late/scenario.hpp"

namespace late::io {

using Json = nlohmann::ordered_json;

// Serializes with fixed key order and every float printed with 17
// significant digits; non-finite numbers become null.
std::string dump(const Json& j, int indent = 2);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

Json to_json(const Population& pop);
Population population_from_json(const Json& j);
Population load_population(const std::string& path);

Json to_json(const ScenarioConfig& cfg);
// Strict: unknown keys are a config error.
ScenarioConfig scenario_from_json(const Json& j);

Json to_json(const EstimateReport& r);
Json to_json(const AcrWeights& w);
Json to_json(const oracle::WeightedParameter& p);
Json to_json(const oracle::CovariateCombination& c);
Json to_json(const StepCurve& c);
Json to_json(const ComplierProfile& p);
Json to_json(const MonotonicityResult& m);
Json to_json(const RelevanceResult& r);
Json to_json(const SaturationVerdict& v);
Json to_json(const SensitivityReport& r);
Json to_json(const OlsDecomposition& r);
Json to_json(const WeightedEffect& r);
Json to_json(const MisparameterizationRecord& r);

struct CsvMapping {
  std::string y = "y";
  std::string d = "d";
  std::string z = "z";
  std::vector<std::string> x;
  // Column holding row weights, if any.
  std::optional<std::string> weight;
  // Declared instrument support; otherwise the sorted distinct values.
  std::optional<std::vector<double>> z_support;
  // Declared treatment support; otherwise integers >= 0 give levels
  // 0..max(D) and anything else a continuous interval [min D, max D].
  std::optional<TreatmentSupport> d_support;
};

// Strict reader: a header row, comma separated, '.' decimals. Any missing
// or unparseable cell aborts with its data row number (1 = first row after
// the header) and file line.
ObservedSample parse_csv(std::istream& in, const CsvMapping& mapping,
                         const std::string& source = "<input>");
ObservedSample load_csv(const std::string& path, const CsvMapping& mapping);

// Columns y, d, z, covariate names (as labels), then weight when the
// sample is weighted.
void write_csv(const ObservedSample& s, std::ostream& out);
std::string to_csv(const ObservedSample& s);

}  // namespace late::io
