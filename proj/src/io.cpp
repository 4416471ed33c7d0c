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

#include "cica/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cica {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_history_csv(const std::filesystem::path& path, std::span<const Observation> history, std::size_t startup) {
  std::ostringstream out;
  out << "trial,phase,k,eta0,f1,f2\n";
  for (const auto& o : history) {
    out << o.trial << ',' << (o.trial < startup ? "startup" : "guided") << ',' << format_number(o.k) << ','
        << format_number(o.eta0) << ',' << format_number(o.f.f1) << ',' << format_number(o.f.f2) << '\n';
  }
  write_text(path, out.str());
}

void write_front_csv(const std::filesystem::path& path, const TrainingResult& result) {
  std::ostringstream out;
  out << "trial,k,eta0,f1,f2,validation_p99,selected\n";
  for (std::size_t i = 0; i < result.front.size(); ++i) {
    const auto& o = result.front[i];
    const double tail = i < result.front_tail_costs.size() ? result.front_tail_costs[i] : std::nan("");
    const bool selected = o.k == result.selected.k && o.eta0 == result.selected.eta0;
    out << o.trial << ',' << format_number(o.k) << ',' << format_number(o.eta0) << ',' << format_number(o.f.f1) << ','
        << format_number(o.f.f2) << ',' << format_number(tail) << ',' << (selected ? 1 : 0) << '\n';
  }
  write_text(path, out.str());
}

nlohmann::json selected_params_json(const TrainingResult& result) {
  return {
      {"schema_version", kArtifactSchemaVersion},
      {"k", result.selected.k},
      {"eta0", result.selected.eta0},
      {"nu", result.selected.nu},
      {"validation_p99_mean_lqr", result.selected_tail_cost},
  };
}

CicaParams read_selected_params(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("trained CICA parameters not found: " + path.string());
  }
  const auto doc = read_json(path);
  try {
    if (doc.at("schema_version").get<int>() != kArtifactSchemaVersion) {
      throw std::runtime_error("unsupported schema_version");
    }
    CicaParams p{doc.at("k").get<double>(), doc.at("eta0").get<double>(), doc.at("nu").get<double>()};
    p.validate();
    return p;
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": invalid trained parameters: " + e.what());
  }
}

void write_mean_lqr_csv(const std::filesystem::path& path, std::span<const EpisodeResult> results) {
  std::ostringstream out;
  out << "episode,plant,mean_lqr,diverged\n";
  for (std::size_t e = 0; e < results.size(); ++e) {
    for (std::size_t n = 0; n < results[e].mean_lqr.size(); ++n) {
      out << e << ',' << n << ',' << format_number(results[e].mean_lqr[n]) << ',' << (results[e].diverged[n] ? 1 : 0)
          << '\n';
    }
  }
  write_text(path, out.str());
}

void write_ccdf_csv(const std::filesystem::path& path, const MetricsSummary& summary) {
  std::ostringstream out;
  out << "threshold,position_ccdf,angle_ccdf\n";
  for (std::size_t j = 0; j < summary.ccdf_grid.size(); ++j) {
    out << format_number(summary.ccdf_grid[j]) << ',' << format_number(summary.position_ccdf[j]) << ','
        << format_number(summary.angle_ccdf[j]) << '\n';
  }
  write_text(path, out.str());
}

void write_delay_csv(const std::filesystem::path& path, std::span<const EpisodeResult> results) {
  std::vector<std::uint64_t> pooled(kDelayBuckets, 0);
  for (const auto& r : results) {
    for (std::size_t b = 0; b < r.delay_hist.size() && b < pooled.size(); ++b) pooled[b] += r.delay_hist[b];
  }
  std::ostringstream out;
  out << "delay_steps,count,overflow\n";
  for (std::size_t b = 0; b < pooled.size(); ++b) {
    out << b << ',' << pooled[b] << ',' << (b + 1 == pooled.size() ? 1 : 0) << '\n';
  }
  write_text(path, out.str());
}

nlohmann::json summary_json(const MetricsSummary& summary, const ScenarioConfig& cfg, const PolicySpec& policy,
                            std::size_t episodes) {
  nlohmann::json doc{
      {"schema_version", kArtifactSchemaVersion},
      {"policy", policy.label()},
      {"n_subnetworks", cfg.n_subnetworks},
      {"episodes", episodes},
      {"horizon", cfg.horizon},
      {"seed", cfg.seed},
      {"p99_mean_lqr", summary.p99_mean_lqr},
      {"mean_of_means", summary.mean_of_means},
      {"max_of_means", summary.max_of_means},
      {"failure_rate", summary.failure_rate},
      {"position_exceed_prob", summary.position_exceed_prob},
      {"angle_exceed_prob", summary.angle_exceed_prob},
      {"plants", summary.plants},
      {"diverged", summary.diverged},
      {"thresholds", {{"position", cfg.thresholds.position}, {"angle", cfg.thresholds.angle}}},
  };
  if (policy.kind == PolicyKind::kCica) {
    doc["cica"] = {{"k", policy.cica.k}, {"eta0", policy.cica.eta0}, {"nu", policy.cica.nu}};
  }
  return doc;
}

}  // namespace cica
