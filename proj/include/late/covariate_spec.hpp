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

#include <string>
#include <vector>

namespace late {

// How covariates enter a TSLS fit. Only indicators for every observed
// covariate cell (jointly over all covariates) keep the LATE reading.
struct CovariateSpecification {
  enum class Form { kCellIndicators, kLinear, kNone };

  Form form = Form::kCellIndicators;
  // Covariates included; empty means every covariate of the schema.
  std::vector<std::string> covariates;

  // "cells", "cells:a,b", "linear", "linear:a", "none".
  static CovariateSpecification parse(const std::string& text);
  std::string describe() const;
};

}  // namespace late
