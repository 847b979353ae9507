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

#include "late/fixtures.hpp"

#include "late/embedded_fixtures.hpp"
#include "late/error.hpp"
#include "late/io.hpp"

namespace late::fixtures {

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : detail::kEmbedded) out.emplace_back(name);
  return out;
}

Population load(const std::string& name) {
  for (const auto& [n, text] : detail::kEmbedded) {
    if (n == name) return io::population_from_json(io::Json::parse(text));
  }
  fail(ErrorCode::kInvalidArgument, "unknown fixture '" + name + "'");
}

}  // namespace late::fixtures
