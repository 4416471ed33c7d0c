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

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cica/linksim.hpp"
#include "cica/motpe.hpp"
#include "cica/plant.hpp"
#include "cica/policy.hpp"
#include "cica/radio.hpp"

namespace cica {

struct PlantSpec {
  /// When set, these matrices replace the built-in cart-pole.
  struct Custom {
    Matrix A, B, Q, R;
  };
  std::optional<Custom> custom;
  /// Forward-Euler interval applied to the built-in cart-pole; 1.0 keeps
  /// the one-step matrices verbatim.
  double sampling_dt = 5e-4;
  double x0_halfwidth = 0.05;
  std::size_t position_index = 0;  // state entry reported as cart position
  std::size_t angle_index = 2;     // state entry reported as pole angle
};

struct TrafficParams {
  double packet_bits = 1024.0;  // 128 bytes
  std::int64_t period_steps = 2;
  std::size_t buffer_capacity = 0;  // packets; 0 = unbounded FIFO
};

struct FailureThresholds {
  double position = 0.68;
  double angle = 0.055 * 3.14159265358979323846;
};

struct ScenarioConfig {
  std::size_t n_subnetworks = 30;
  std::int64_t horizon = 4000;
  std::size_t episodes = 500;
  std::uint64_t seed = 1;
  double sigma_w = 1.6e-3;
  double eta_cap = 1e9;
  PlantSpec plant;
  RadioParams radio;
  ChannelParams channel;
  TrafficParams traffic;
  PolicySpec policy;
  FailureThresholds thresholds;

  void validate() const;
  PlantModel build_plant() const;
};

/// Independent random streams of one simulated world.
enum class Stream : std::uint64_t {
  kLayout = 1,
  kChannel = 2,
  kInitialState = 3,
  kProcessNoise = 4,
  kMeasurementNoise = 5,
  kScheduling = 6,
  kPolicy = 7,
};

/// Which family of worlds an episode belongs to. Training, validation and
/// evaluation never share a world.
enum class Domain : std::uint64_t { kTraining = 1, kValidation = 2, kEvaluation = 3 };

struct WorldKey {
  std::uint64_t master_seed = 0;
  Domain domain = Domain::kEvaluation;
  std::uint64_t episode = 0;

  std::mt19937_64 stream(Stream s, std::uint64_t index = 0) const;
};

/// Exceedance counts of |state| over a fixed log-spaced threshold grid.
struct StateErrorTally {
  static const std::vector<double>& grid();

  std::vector<std::uint64_t> position_hist;  // bucket b: values with exactly b grid thresholds below them
  std::vector<std::uint64_t> angle_hist;
  std::uint64_t samples = 0;
  std::uint64_t position_exceed = 0;  // |x| > configured threshold
  std::uint64_t angle_exceed = 0;

  StateErrorTally();
  void add(double abs_position, double abs_angle, const FailureThresholds& th);
  void merge(const StateErrorTally& other);
  /// P(|.| > grid[j]) for every grid point.
  std::vector<double> position_ccdf() const;
  std::vector<double> angle_ccdf() const;
};

struct EpisodeResult {
  std::vector<double> mean_lqr;  // per plant
  std::vector<bool> diverged;
  StateErrorTally state_errors;
  std::vector<std::uint64_t> delay_hist;  // delivery delay in steps; last bucket is overflow
  std::uint64_t deliveries = 0;
};

inline constexpr std::size_t kDelayBuckets = 65;

/// Plant model and LQR gain shared by every episode of a scenario.
class Scenario {
 public:
  explicit Scenario(ScenarioConfig cfg);

  const ScenarioConfig& config() const { return cfg_; }
  const PlantModel& plant() const { return plant_; }
  const LqrGain& gain() const { return gain_; }

  /// Deploy, realize the channel and co-simulate `horizon` steps.
  EpisodeResult run_episode(const PolicySpec& policy, const WorldKey& world,
                            ChannelRealization* channel_out = nullptr) const;

  /// Episodes 0..count-1 of `domain`, spread over `jobs` threads. Results
  /// are ordered by episode index regardless of scheduling.
  std::vector<EpisodeResult> run_episodes(const PolicySpec& policy, Domain domain, std::size_t count,
                                          std::size_t jobs) const;

 private:
  ScenarioConfig cfg_;
  PlantModel plant_;
  LqrGain gain_;
};

/// f1 = grand mean of every plant's mean LQR cost, f2 = the maximum.
Objectives objectives(std::span<const EpisodeResult> results);

struct MetricsSummary {
  double p99_mean_lqr = 0.0;
  double mean_of_means = 0.0;
  double max_of_means = 0.0;
  double failure_rate = 0.0;
  double position_exceed_prob = 0.0;
  double angle_exceed_prob = 0.0;
  std::size_t plants = 0;
  std::size_t diverged = 0;
  std::vector<double> ccdf_grid;
  std::vector<double> position_ccdf;
  std::vector<double> angle_ccdf;
};

/// Linear-interpolation empirical quantile (numpy's default definition).
double quantile(std::vector<double> values, double q);

/// Pools every plant of every episode. The failure rate is the larger of
/// the two exceedance probabilities at the configured thresholds.
MetricsSummary summarize(std::span<const EpisodeResult> results);

struct TrainingConfig {
  std::size_t n_subnetworks = 30;
  std::size_t episodes = 20;
  std::size_t validation_episodes = 20;
  MotpeConfig motpe;
};

struct TrainingResult {
  CicaParams selected;
  double selected_tail_cost = 0.0;
  std::vector<Observation> front;
  std::vector<double> front_tail_costs;  // validation p99 per front member
  std::vector<Observation> history;
};

/// Learns the CICA (k, eta0) pair: MOTPE over (mean, max) of the mean LQR
/// costs on training worlds, then the front member with the lowest 99th
/// percentile mean LQR cost on validation worlds.
TrainingResult train_cica(const ScenarioConfig& scenario, const TrainingConfig& training, std::size_t jobs);

}  // namespace cica
