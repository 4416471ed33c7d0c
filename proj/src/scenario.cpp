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

#include "cica/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace cica {

void ScenarioConfig::validate() const {
  if (n_subnetworks < 1) throw std::invalid_argument("n_subnetworks must be at least 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (episodes < 1) throw std::invalid_argument("episodes must be at least 1");
  if (!(sigma_w >= 0.0) || !std::isfinite(sigma_w)) throw std::invalid_argument("sigma_w must be non-negative");
  if (!(eta_cap > 0.0)) throw std::invalid_argument("eta_cap must be positive");
  if (!(plant.x0_halfwidth >= 0.0)) throw std::invalid_argument("plant.x0_halfwidth must be non-negative");
  if (!(plant.sampling_dt > 0.0)) throw std::invalid_argument("plant.sampling_dt must be positive");
  if (!(traffic.packet_bits > 0.0)) throw std::invalid_argument("traffic.packet_bits must be positive");
  if (traffic.period_steps < 1) throw std::invalid_argument("traffic.period_steps must be at least 1");
  if (!(thresholds.position >= 0.0) || !(thresholds.angle >= 0.0)) {
    throw std::invalid_argument("failure thresholds must be non-negative");
  }
  radio.validate();
  if (policy.kind == PolicyKind::kRoundRobin && (policy.rr_slots < 1 || policy.rr_slots > n_subnetworks)) {
    throw std::invalid_argument("round robin needs 1 <= I <= n_subnetworks");
  }
}

PlantModel ScenarioConfig::build_plant() const {
  if (plant.custom) {
    const auto& c = *plant.custom;
    const auto q = c.A.rows();
    PlantModel model(c.A, c.B, c.Q, c.R, sigma_w * sigma_w * Matrix::Identity(q, q));
    if (plant.position_index >= static_cast<std::size_t>(q) || plant.angle_index >= static_cast<std::size_t>(q)) {
      throw std::invalid_argument("plant state indices out of range");
    }
    return model;
  }
  return PlantModel::cart_pole_sampled(plant.sampling_dt, sigma_w);
}

std::mt19937_64 WorldKey::stream(Stream s, std::uint64_t index) const {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(domain), static_cast<std::uint32_t>(episode),
                    static_cast<std::uint32_t>(episode >> 32), static_cast<std::uint32_t>(s),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

const std::vector<double>& StateErrorTally::grid() {
  // 1e-4 .. 1e2, twenty points per decade.
  static const std::vector<double> g = [] {
    std::vector<double> v;
    for (int i = 0; i <= 120; ++i) v.push_back(std::pow(10.0, -4.0 + i / 20.0));
    return v;
  }();
  return g;
}

StateErrorTally::StateErrorTally()
    : position_hist(grid().size() + 1, 0), angle_hist(grid().size() + 1, 0) {}

void StateErrorTally::add(double abs_position, double abs_angle, const FailureThresholds& th) {
  const auto& g = grid();
  auto bucket = [&](double v) {
    // Non-finite magnitudes (a blown-up plant) exceed every threshold.
    if (!(v <= g.back())) return g.size();
    return static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), v) - g.begin());
  };
  ++position_hist[bucket(abs_position)];
  ++angle_hist[bucket(abs_angle)];
  ++samples;
  if (!(abs_position <= th.position)) ++position_exceed;
  if (!(abs_angle <= th.angle)) ++angle_exceed;
}

void StateErrorTally::merge(const StateErrorTally& other) {
  for (std::size_t i = 0; i < position_hist.size(); ++i) {
    position_hist[i] += other.position_hist[i];
    angle_hist[i] += other.angle_hist[i];
  }
  samples += other.samples;
  position_exceed += other.position_exceed;
  angle_exceed += other.angle_exceed;
}

namespace {

std::vector<double> ccdf_from_hist(const std::vector<std::uint64_t>& hist, std::uint64_t samples) {
  // Bucket b holds values with exactly b grid points strictly below them,
  // so the value exceeds grid[j] iff b > j.
  const std::size_t m = hist.size() - 1;
  std::vector<double> out(m, 0.0);
  if (samples == 0) return out;
  std::uint64_t above = 0;
  for (std::size_t j = m; j-- > 0;) {
    above += hist[j + 1];
    out[j] = static_cast<double>(above) / static_cast<double>(samples);
  }
  return out;
}

}  // namespace

std::vector<double> StateErrorTally::position_ccdf() const { return ccdf_from_hist(position_hist, samples); }
std::vector<double> StateErrorTally::angle_ccdf() const { return ccdf_from_hist(angle_hist, samples); }

Scenario::Scenario(ScenarioConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))), plant_(cfg_.build_plant()), gain_(solve_dare(plant_)) {}

EpisodeResult Scenario::run_episode(const PolicySpec& policy_spec, const WorldKey& world,
                                    ChannelRealization* channel_out) const {
  const std::size_t n = cfg_.n_subnetworks;
  const std::int64_t horizon = cfg_.horizon;
  const int q = plant_.state_dim();

  auto layout_rng = world.stream(Stream::kLayout);
  auto channel_rng = world.stream(Stream::kChannel);
  auto init_rng = world.stream(Stream::kInitialState);
  auto sched_rng = world.stream(Stream::kScheduling);
  auto policy_rng = world.stream(Stream::kPolicy);

  const auto& ch_params = cfg_.channel;
  const FactoryLayout layout =
      deploy(n, ch_params.area_width, ch_params.area_height, ch_params.subnetwork_radius, layout_rng);
  const ChannelRealization channel = realize_channel(layout, ch_params, channel_rng);
  if (channel_out != nullptr) *channel_out = channel;
  const Eigen::MatrixXd gains = channel.power_gains();

  PolicyRunner runner(policy_spec, cfg_.radio);
  runner.begin_episode(channel, policy_rng);

  std::uniform_real_distribution<double> x0_dist(-cfg_.plant.x0_halfwidth, cfg_.plant.x0_halfwidth);
  std::vector<PlantState> plants;
  std::vector<TransmitBuffer> buffers;
  std::vector<std::mt19937_64> process_rng;
  std::vector<std::mt19937_64> measure_rng;
  plants.reserve(n);
  buffers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector x0(q);
    for (int j = 0; j < q; ++j) x0[j] = cfg_.plant.x0_halfwidth > 0.0 ? x0_dist(init_rng) : 0.0;
    plants.push_back(PlantState::at(std::move(x0), plant_.input_dim()));
    buffers.emplace_back(cfg_.traffic.packet_bits, cfg_.traffic.period_steps, cfg_.traffic.buffer_capacity);
    process_rng.push_back(world.stream(Stream::kProcessNoise, i));
    measure_rng.push_back(world.stream(Stream::kMeasurementNoise, i));
  }

  EpisodeResult result;
  result.mean_lqr.assign(n, 0.0);
  result.diverged.assign(n, false);
  result.delay_hist.assign(kDelayBuckets, 0);
  std::vector<double> lqr_sum(n, 0.0);
  std::vector<double> last_eta(n, 0.0);
  std::vector<bool> frozen(n, false);
  std::vector<double> slot(n, 1.0);
  const double cap = cfg_.eta_cap;
  const double inf = std::numeric_limits<double>::infinity();

  for (std::int64_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) buffers[i].enqueue_if_due(t, plants[i].x);

    const PolicyDecision& decision = runner.decide(t, last_eta, sched_rng);
    const auto r = rates(decision.powers, gains, decision.active, cfg_.radio, decision.interference_free);
    std::fill(slot.begin(), slot.end(), decision.slot_fraction);
    const auto events = advance_buffers(buffers, r, slot, t, cfg_.radio);
    for (const auto& e : events) {
      ++result.delay_hist[std::min<std::size_t>(static_cast<std::size_t>(e.delay()), kDelayBuckets - 1)];
    }
    result.deliveries += events.size();

    for (std::size_t i = 0; i < n; ++i) {
      // Both noise streams advance every step so that worlds stay aligned
      // across policies.
      const Vector measurement = sample_noise(plant_, measure_rng[i]);
      const Vector process = sample_noise(plant_, process_rng[i]);
      if (frozen[i]) {
        result.state_errors.add(inf, inf, cfg_.thresholds);
        lqr_sum[i] += cap;
        last_eta[i] = cap;
        continue;
      }
      const auto& x = plants[i].x;
      result.state_errors.add(std::abs(x[static_cast<Eigen::Index>(cfg_.plant.position_index)]),
                              std::abs(x[static_cast<Eigen::Index>(cfg_.plant.angle_index)]), cfg_.thresholds);
      const auto obs = freshest_delivery(events, i, measurement);
      const auto step = step_plant(plants[i], plant_, gain_, obs, process);
      double eta = step.eta;
      // Capped plants keep evolving and may recover; only an overflowed
      // state is frozen at the cap.
      if (!(eta <= cap)) {
        eta = cap;
        result.diverged[i] = true;
      }
      if (!plants[i].x.allFinite()) {
        eta = cap;
        result.diverged[i] = true;
        frozen[i] = true;
      }
      lqr_sum[i] += eta;
      last_eta[i] = eta;
    }
  }
  for (std::size_t i = 0; i < n; ++i) result.mean_lqr[i] = lqr_sum[i] / static_cast<double>(horizon);
  return result;
}

std::vector<EpisodeResult> Scenario::run_episodes(const PolicySpec& policy, Domain domain, std::size_t count,
                                                  std::size_t jobs) const {
  std::vector<EpisodeResult> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t e = next.fetch_add(1);
      if (e >= count) return;
      try {
        results[e] = run_episode(policy, WorldKey{cfg_.seed, domain, e});
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

Objectives objectives(std::span<const EpisodeResult> results) {
  if (results.empty()) throw std::invalid_argument("objectives: no episodes");
  double sum = 0.0;
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& r : results) {
    for (double v : r.mean_lqr) {
      sum += v;
      worst = std::max(worst, v);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("objectives: no plants");
  return {sum / static_cast<double>(count), worst};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

MetricsSummary summarize(std::span<const EpisodeResult> results) {
  if (results.empty()) throw std::invalid_argument("summarize: no episodes");
  MetricsSummary s;
  std::vector<double> pooled;
  StateErrorTally tally;
  for (const auto& r : results) {
    pooled.insert(pooled.end(), r.mean_lqr.begin(), r.mean_lqr.end());
    s.diverged += static_cast<std::size_t>(std::count(r.diverged.begin(), r.diverged.end(), true));
    tally.merge(r.state_errors);
  }
  const auto f = objectives(results);
  s.mean_of_means = f.f1;
  s.max_of_means = f.f2;
  s.plants = pooled.size();
  s.p99_mean_lqr = quantile(std::move(pooled), 0.99);
  if (tally.samples > 0) {
    s.position_exceed_prob = static_cast<double>(tally.position_exceed) / static_cast<double>(tally.samples);
    s.angle_exceed_prob = static_cast<double>(tally.angle_exceed) / static_cast<double>(tally.samples);
  }
  s.failure_rate = std::max(s.position_exceed_prob, s.angle_exceed_prob);
  s.ccdf_grid = StateErrorTally::grid();
  s.position_ccdf = tally.position_ccdf();
  s.angle_ccdf = tally.angle_ccdf();
  return s;
}

TrainingResult train_cica(const ScenarioConfig& scenario_cfg, const TrainingConfig& training, std::size_t jobs) {
  if (training.episodes < 1 || training.validation_episodes < 1) {
    throw std::invalid_argument("training needs at least one training and one validation episode");
  }
  ScenarioConfig cfg = scenario_cfg;
  cfg.n_subnetworks = training.n_subnetworks;
  const Scenario scenario(cfg);

  auto cica_spec = [&](double k, double eta0) {
    PolicySpec spec;
    spec.kind = PolicyKind::kCica;
    spec.cica = CicaParams{k, eta0, cfg.radio.p_max_w};
    return spec;
  };
  const Evaluator evaluate = [&](double k, double eta0) {
    const auto results = scenario.run_episodes(cica_spec(k, eta0), Domain::kTraining, training.episodes, jobs);
    return objectives(results);
  };

  auto rng = WorldKey{cfg.seed, Domain::kTraining, 0}.stream(Stream::kPolicy, 0xB0);
  const MotpeResult opt = optimize(evaluate, training.motpe, rng);

  const auto selection = select_by_tail_cost(opt.front, [&](double k, double eta0) {
    const auto results =
        scenario.run_episodes(cica_spec(k, eta0), Domain::kValidation, training.validation_episodes, jobs);
    return summarize(results).p99_mean_lqr;
  });

  TrainingResult out;
  const auto& best = opt.front[selection.index];
  out.selected = CicaParams{best.k, best.eta0, cfg.radio.p_max_w};
  out.selected_tail_cost = selection.tail_cost;
  out.front = opt.front;
  out.front_tail_costs = selection.tail_costs;
  out.history = opt.history;
  return out;
}

}  // namespace cica
