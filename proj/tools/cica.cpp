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

// Command-line entry point: train, eval, compare and rerun.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cica/commands.hpp"
#include "cica/io.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  std::optional<std::int64_t> horizon;
  std::size_t jobs = 0;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Override the master seed");
  cmd->add_option("--jobs", o.jobs, "Worker threads (default: all cores)");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--horizon", o.horizon, "Override the episode length J")->check(CLI::PositiveNumber);
}

cica::RunConfig load(const Overrides& o) {
  cica::RunConfig cfg = cica::load_config(o.config_path);
  if (o.seed) cfg.scenario.seed = *o.seed;
  if (o.horizon) cfg.scenario.horizon = *o.horizon;
  return cfg;
}

std::size_t jobs_or_default(std::size_t jobs) {
  return jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
}

void print_summary(const cica::MetricsSummary& s) {
  std::printf("p99 mean LQR cost  %s\n", cica::format_number(s.p99_mean_lqr).c_str());
  std::printf("mean / max         %s / %s\n", cica::format_number(s.mean_of_means).c_str(),
              cica::format_number(s.max_of_means).c_str());
  std::printf("failure rate       %s\n", cica::format_number(s.failure_rate).c_str());
  std::printf("diverged plants    %zu of %zu\n", s.diverged, s.plants);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-simulator for control-aware power allocation in in-factory subnetworks"};
  app.set_version_flag("--version", cica::tool_version());
  app.require_subcommand(1);

  Overrides train_o;
  auto* train = app.add_subcommand("train", "Learn CICA parameters with MOTPE");
  add_common(train, train_o);
  train->add_option("--episodes", train_o.episodes, "Override training episodes per trial")
      ->check(CLI::PositiveNumber);

  Overrides eval_o;
  std::string policy;
  std::optional<std::size_t> density;
  std::optional<std::string> eval_params;
  bool dump_channel = false;
  auto* eval = app.add_subcommand("eval", "Evaluate one policy");
  add_common(eval, eval_o);
  eval->add_option("--policy", policy, "cica, fixed, mpr, rr<I> or nointerf")->required();
  eval->add_option("--density", density, "Number of subnetworks")->check(CLI::PositiveNumber);
  eval->add_option("--episodes", eval_o.episodes, "Override evaluation episodes")->check(CLI::PositiveNumber);
  eval->add_option("--params", eval_params, "selected_params.json from train");
  eval->add_flag("--dump-channel", dump_channel, "Also write the channel of episode 0");

  Overrides cmp_o;
  std::vector<std::size_t> densities;
  std::optional<std::string> cmp_params;
  auto* compare = app.add_subcommand("compare", "Evaluate every policy at every density");
  add_common(compare, cmp_o);
  compare->add_option("--density", densities, "Densities (repeatable; default from config)")
      ->check(CLI::PositiveNumber);
  compare->add_option("--episodes", cmp_o.episodes, "Override evaluation episodes")->check(CLI::PositiveNumber);
  compare->add_option("--params", cmp_params, "selected_params.json from train");

  std::string manifest;
  std::string rerun_out = "rerun";
  std::size_t rerun_jobs = 0;
  auto* rerun = app.add_subcommand("rerun", "Replay the run recorded in a manifest");
  rerun->add_option("manifest", manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  rerun->add_option("--out", rerun_out, "Output directory")->capture_default_str();
  rerun->add_option("--jobs", rerun_jobs, "Worker threads (default: all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      auto cfg = load(train_o);
      if (train_o.episodes) cfg.training.episodes = *train_o.episodes;
      const auto result = cica::run_train(cfg, train_o.out, jobs_or_default(train_o.jobs));
      std::printf("selected k = %s, eta0 = %s (validation p99 %s)\n", cica::format_number(result.selected.k).c_str(),
                  cica::format_number(result.selected.eta0).c_str(),
                  cica::format_number(result.selected_tail_cost).c_str());
    } else if (*eval) {
      auto cfg = load(eval_o);
      if (eval_o.episodes) cfg.scenario.episodes = *eval_o.episodes;
      if (density) cfg.scenario.n_subnetworks = *density;
      cica::EvalRequest req;
      req.policy = policy;
      req.dump_channel = dump_channel;
      req.trained_cica = cica::resolve_cica_params(cfg, eval_params);
      print_summary(cica::run_eval(cfg, req, eval_o.out, jobs_or_default(eval_o.jobs)));
    } else if (*compare) {
      auto cfg = load(cmp_o);
      if (cmp_o.episodes) cfg.scenario.episodes = *cmp_o.episodes;
      if (!densities.empty()) cfg.evaluation.densities = densities;
      cica::CompareRequest req;
      req.trained_cica = cica::resolve_cica_params(cfg, cmp_params);
      const auto report = cica::run_compare(cfg, req, cmp_o.out, jobs_or_default(cmp_o.jobs));
      for (const auto& cell : report.cells) {
        if (cell.summary) {
          std::printf("%-9s N=%-3zu p99 %-24s FR %s\n", cell.policy.c_str(), cell.n_subnetworks,
                      cica::format_number(cell.summary->p99_mean_lqr).c_str(),
                      cica::format_number(cell.summary->failure_rate).c_str());
        } else {
          std::printf("%-9s N=%-3zu error: %s\n", cell.policy.c_str(), cell.n_subnetworks, cell.error.c_str());
        }
      }
      if (!report.ok()) return 3;
    } else if (*rerun) {
      cica::rerun(manifest, rerun_out, jobs_or_default(rerun_jobs));
    }
  } catch (const cica::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
