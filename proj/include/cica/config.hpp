// Copyright 2026 The CICA Subnetwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cica/scenario.hpp"

namespace cica {

/// Raised for unreadable, malformed or invalid configuration documents.
/// The message names the offending key and, when known, its line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvaluationConfig {
  std::vector<std::size_t> densities{25, 30, 35};
  std::vector<std::string> policies{"cica", "fixed", "mpr", "rr5", "rr10", "nointerf"};
  /// Trained CICA parameters (selected_params.json). Empty means none.
  std::string cica_params;
};

struct RunConfig {
  ScenarioConfig scenario;
  TrainingConfig training;
  EvaluationConfig evaluation;

  void validate() const;
};

/// Parses a JSON configuration. Only "seed" is mandatory; every other key
/// falls back to the simulation defaults. Unknown keys are rejected.
/// `source` prefixes error messages (usually the file name).
RunConfig parse_config(std::string_view text, const std::string& source = "config");

RunConfig load_config(const std::string& path);

/// Fully resolved configuration; parse_config(to_json(c).dump()) == c.
nlohmann::json to_json(const RunConfig& config);

/// Maps dotted key paths ("plant.sampling_dt", "evaluation.densities.1")
/// to 1-based line numbers in `text`. `text` must be valid JSON.
std::map<std::string, int> key_lines(std::string_view text);

}  // namespace cica
