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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cica/config.hpp"

namespace cica {

/// Version tag recorded in every manifest.
const char* tool_version();

struct EvalRequest {
  std::string policy = "nointerf";
  /// True once config.scenario.policy.cica holds trained parameters.
  bool trained_cica = false;
  bool dump_channel = false;
};

struct CompareRequest {
  bool trained_cica = false;
};

struct CompareCell {
  std::string policy;
  std::size_t n_subnetworks = 0;
  std::optional<MetricsSummary> summary;
  std::string error;  // non-empty when the cell could not be computed
};

struct CompareReport {
  std::vector<CompareCell> cells;  // policy-major, densities in config order
  bool ok() const;
};

/// Each command writes its artifacts and manifest.json into `out` and
/// returns what it computed. Results depend only on `config` and the
/// request, never on `jobs`.
TrainingResult run_train(const RunConfig& config, const std::filesystem::path& out, std::size_t jobs);
MetricsSummary run_eval(const RunConfig& config, const EvalRequest& request, const std::filesystem::path& out,
                        std::size_t jobs);
CompareReport run_compare(const RunConfig& config, const CompareRequest& request, const std::filesystem::path& out,
                          std::size_t jobs);

/// Replays the command recorded in a manifest into `out`.
void rerun(const std::filesystem::path& manifest, const std::filesystem::path& out, std::size_t jobs);

/// Loads trained parameters into config.scenario.policy.cica. `path`
/// overrides config.evaluation.cica_params. Returns false when neither
/// names a file.
bool resolve_cica_params(RunConfig& config, const std::optional<std::string>& path);

/// Files written by a command, manifest excluded, sorted by name.
std::vector<std::string> manifest_files(const nlohmann::json& manifest);

}  // namespace cica
