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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cica/scenario.hpp"

namespace cica {

/// Bumped whenever a column or field of an output artifact changes.
inline constexpr int kArtifactSchemaVersion = 1;

/// Round-trip decimal text; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// trial,phase,k,eta0,f1,f2
void write_history_csv(const std::filesystem::path& path, std::span<const Observation> history, std::size_t startup);

/// trial,k,eta0,f1,f2,validation_p99,selected
void write_front_csv(const std::filesystem::path& path, const TrainingResult& result);

nlohmann::json selected_params_json(const TrainingResult& result);

/// Reads the CICA parameters written by `train`; throws std::runtime_error
/// when the file is missing or malformed.
CicaParams read_selected_params(const std::filesystem::path& path);

/// episode,plant,mean_lqr,diverged
void write_mean_lqr_csv(const std::filesystem::path& path, std::span<const EpisodeResult> results);

/// threshold,position_ccdf,angle_ccdf over the fixed log-spaced grid.
void write_ccdf_csv(const std::filesystem::path& path, const MetricsSummary& summary);

/// delay_steps,count,overflow pooled over all episodes.
void write_delay_csv(const std::filesystem::path& path, std::span<const EpisodeResult> results);

nlohmann::json summary_json(const MetricsSummary& summary, const ScenarioConfig& cfg, const PolicySpec& policy,
                            std::size_t episodes);

}  // namespace cica
