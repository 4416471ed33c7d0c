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

#include "cica/commands.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include "cica/io.hpp"

#ifndef CICA_VERSION
#define CICA_VERSION "dev"
#endif

namespace cica {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void check(const RunConfig& config) {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

// Applies the configured benchmark settings to a policy named on the
// command line.
PolicySpec policy_for(const std::string& label, const ScenarioConfig& sc, bool trained_cica) {
  PolicySpec spec = PolicySpec::parse(label);
  if (spec.kind == PolicyKind::kCica && !trained_cica) {
    throw std::runtime_error("policy 'cica' needs trained parameters: run 'train' first and pass --params");
  }
  if (spec.kind == PolicyKind::kRoundRobin && spec.rr_slots > sc.n_subnetworks) {
    throw std::invalid_argument("round robin with I = " + std::to_string(spec.rr_slots) + " needs at least " +
                                std::to_string(spec.rr_slots) + " subnetworks, got " +
                                std::to_string(sc.n_subnetworks));
  }
  spec.cica = sc.policy.cica;
  spec.fixed_power_w = sc.policy.fixed_power_w;
  spec.mpr = sc.policy.mpr;
  spec.mpr_per_tti = sc.policy.mpr_per_tti;
  return spec;
}

void write_manifest(const fs::path& out, const std::string& command, const json& request, const RunConfig& config,
                    std::vector<std::string> files, double seconds, std::size_t episodes) {
  std::sort(files.begin(), files.end());
  json manifest{
      {"schema_version", kArtifactSchemaVersion},
      {"tool", "cica"},
      {"version", tool_version()},
      {"command", command},
      {"request", request},
      {"seed", config.scenario.seed},
      {"config", to_json(config)},
      {"output_dir", out.string()},
      {"files", files},
      {"timing",
       {{"wall_seconds", seconds},
        {"episodes_simulated", episodes},
        {"seconds_per_episode", episodes > 0 ? seconds / static_cast<double>(episodes) : 0.0}}},
  };
  write_json(out / "manifest.json", manifest);
}

std::string table_label(std::size_t n) { return "n" + std::to_string(n); }

}  // namespace

const char* tool_version() { return CICA_VERSION; }

bool CompareReport::ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const CompareCell& c) { return c.error.empty(); });
}

bool resolve_cica_params(RunConfig& config, const std::optional<std::string>& path) {
  const std::string source = path.value_or(config.evaluation.cica_params);
  if (source.empty()) return false;
  config.scenario.policy.cica = read_selected_params(source);
  // The parameters now live in the resolved config, so a manifest replay
  // does not depend on the file.
  config.evaluation.cica_params.clear();
  return true;
}

TrainingResult run_train(const RunConfig& config, const fs::path& out, std::size_t jobs) {
  check(config);
  Stopwatch clock;
  TrainingResult result = train_cica(config.scenario, config.training, jobs);
  write_history_csv(out / "history.csv", result.history, config.training.motpe.startup);
  write_front_csv(out / "front.csv", result);
  write_json(out / "selected_params.json", selected_params_json(result));
  const std::size_t episodes = result.history.size() * config.training.episodes +
                               result.front.size() * config.training.validation_episodes;
  write_manifest(out, "train", json::object(), config, {"history.csv", "front.csv", "selected_params.json"},
                 clock.seconds(), episodes);
  return result;
}

MetricsSummary run_eval(const RunConfig& config, const EvalRequest& request, const fs::path& out, std::size_t jobs) {
  check(config);
  Stopwatch clock;
  ScenarioConfig sc = config.scenario;
  const PolicySpec spec = policy_for(request.policy, sc, request.trained_cica);
  sc.policy = spec;
  const Scenario scenario(sc);
  const auto results = scenario.run_episodes(spec, Domain::kEvaluation, sc.episodes, jobs);
  const MetricsSummary summary = summarize(results);

  std::vector<std::string> files{"summary.json", "mean_lqr.csv", "ccdf.csv", "delay_hist.csv"};
  write_json(out / "summary.json", summary_json(summary, sc, spec, sc.episodes));
  write_mean_lqr_csv(out / "mean_lqr.csv", results);
  write_ccdf_csv(out / "ccdf.csv", summary);
  write_delay_csv(out / "delay_hist.csv", results);
  if (request.dump_channel) {
    ChannelRealization channel;
    scenario.run_episode(spec, WorldKey{sc.seed, Domain::kEvaluation, 0}, &channel);
    write_channel_csv(channel, (out / "channel.csv").string());
    files.emplace_back("channel.csv");
  }
  const json req{{"policy", request.policy}, {"trained_cica", request.trained_cica},
                 {"dump_channel", request.dump_channel}};
  write_manifest(out, "eval", req, config, files, clock.seconds(), sc.episodes);
  return summary;
}

CompareReport run_compare(const RunConfig& config, const CompareRequest& request, const fs::path& out,
                          std::size_t jobs) {
  check(config);
  Stopwatch clock;
  const auto& densities = config.evaluation.densities;
  CompareReport report;
  std::vector<std::string> files;
  std::size_t simulated = 0;

  for (const auto& label : config.evaluation.policies) {
    for (const std::size_t n : densities) {
      CompareCell cell{label, n, std::nullopt, {}};
      try {
        ScenarioConfig sc = config.scenario;
        sc.n_subnetworks = n;
        const PolicySpec spec = policy_for(label, sc, request.trained_cica);
        sc.policy = spec;
        const Scenario scenario(sc);
        const auto results = scenario.run_episodes(spec, Domain::kEvaluation, sc.episodes, jobs);
        simulated += results.size();
        cell.summary = summarize(results);
        const std::string name = "ccdf_" + label + "_" + table_label(n) + ".csv";
        write_ccdf_csv(out / name, *cell.summary);
        files.push_back(name);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      report.cells.push_back(std::move(cell));
    }
  }

  auto table = [&](const std::string& name, auto value) {
    std::ostringstream csv;
    csv << "policy";
    for (auto n : densities) csv << ',' << table_label(n);
    csv << '\n';
    std::size_t i = 0;
    for (const auto& label : config.evaluation.policies) {
      csv << label;
      for (std::size_t d = 0; d < densities.size(); ++d, ++i) {
        const auto& cell = report.cells[i];
        csv << ',' << (cell.summary ? format_number(value(*cell.summary)) : std::string("error"));
      }
      csv << '\n';
    }
    write_text(out / name, csv.str());
    files.push_back(name);
  };
  table("p99_table.csv", [](const MetricsSummary& s) { return s.p99_mean_lqr; });
  table("failure_rate_table.csv", [](const MetricsSummary& s) { return s.failure_rate; });

  json cells = json::array();
  for (const auto& cell : report.cells) {
    json c{{"policy", cell.policy}, {"n_subnetworks", cell.n_subnetworks}};
    if (cell.summary) {
      const auto& s = *cell.summary;
      c["p99_mean_lqr"] = s.p99_mean_lqr;
      c["mean_of_means"] = s.mean_of_means;
      c["max_of_means"] = s.max_of_means;
      c["failure_rate"] = s.failure_rate;
      c["position_exceed_prob"] = s.position_exceed_prob;
      c["angle_exceed_prob"] = s.angle_exceed_prob;
      c["plants"] = s.plants;
      c["diverged"] = s.diverged;
    } else {
      c["error"] = cell.error;
    }
    cells.push_back(std::move(c));
  }
  const auto& th = config.scenario.thresholds;
  write_json(out / "compare_summary.json",
             json{{"schema_version", kArtifactSchemaVersion},
                  {"episodes", config.scenario.episodes},
                  {"horizon", config.scenario.horizon},
                  {"seed", config.scenario.seed},
                  {"thresholds", {{"position", th.position}, {"angle", th.angle}}},
                  {"cells", cells}});
  files.emplace_back("compare_summary.json");

  write_manifest(out, "compare", json{{"trained_cica", request.trained_cica}}, config, files, clock.seconds(),
                 simulated);
  return report;
}

void rerun(const fs::path& manifest_path, const fs::path& out, std::size_t jobs) {
  const json manifest = read_json(manifest_path);
  std::string command;
  RunConfig config;
  json request;
  try {
    if (manifest.at("schema_version").get<int>() != kArtifactSchemaVersion) {
      throw std::runtime_error("unsupported manifest schema_version");
    }
    command = manifest.at("command").get<std::string>();
    request = manifest.at("request");
    config = parse_config(manifest.at("config").dump(), manifest_path.string() + " (config)");
  } catch (const json::exception& e) {
    throw std::runtime_error(manifest_path.string() + ": malformed manifest: " + e.what());
  }
  if (command == "train") {
    run_train(config, out, jobs);
  } else if (command == "eval") {
    EvalRequest r;
    r.policy = request.at("policy").get<std::string>();
    r.trained_cica = request.at("trained_cica").get<bool>();
    r.dump_channel = request.at("dump_channel").get<bool>();
    run_eval(config, r, out, jobs);
  } else if (command == "compare") {
    run_compare(config, CompareRequest{request.at("trained_cica").get<bool>()}, out, jobs);
  } else {
    throw std::runtime_error(manifest_path.string() + ": unknown command '" + command + "'");
  }
}

std::vector<std::string> manifest_files(const nlohmann::json& manifest) {
  return manifest.at("files").get<std::vector<std::string>>();
}

}  // namespace cica
