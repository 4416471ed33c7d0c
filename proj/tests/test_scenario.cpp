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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "cica/scenario.hpp"

using namespace cica;

namespace {

ScenarioConfig small(std::size_t n = 6, std::int64_t horizon = 400) {
  ScenarioConfig cfg;
  cfg.n_subnetworks = n;
  cfg.horizon = horizon;
  cfg.episodes = 2;
  cfg.seed = 3;
  return cfg;
}

EpisodeResult with_costs(std::vector<double> costs) {
  EpisodeResult r;
  r.diverged.assign(costs.size(), false);
  r.mean_lqr = std::move(costs);
  return r;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("noiseless plants at equilibrium cost nothing") {
    auto cfg = small();
    cfg.sigma_w = 0.0;
    cfg.plant.x0_halfwidth = 0.0;
    const Scenario s(cfg);
    for (const char* label : {"nointerf", "fixed", "rr5"}) {
      const auto r = s.run_episode(PolicySpec::parse(label), WorldKey{1, Domain::kEvaluation, 0});
      for (double v : r.mean_lqr) CHECK(v == 0.0);
      for (bool d : r.diverged) CHECK_FALSE(d);
    }
  }

  TEST_CASE("silent transmitters leave every unstable plant to diverge") {
    auto cfg = small(4, 4000);
    cfg.radio.p_max_w = 1e-3;
    const Scenario s(cfg);
    PolicySpec off = PolicySpec::parse("fixed");
    off.fixed_power_w = 0.0;
    const auto r = s.run_episode(off, WorldKey{1, Domain::kEvaluation, 0});
    CHECK(r.deliveries == 0);
    for (bool d : r.diverged) CHECK(d);
    const std::vector<EpisodeResult> one{r};
    CHECK(summarize(one).failure_rate > 0.5);
  }

  TEST_CASE("episodes are reproducible and independent of thread count") {
    const Scenario s(small());
    const auto spec = PolicySpec::parse("fixed");
    const auto a = s.run_episodes(spec, Domain::kEvaluation, 4, 1);
    const auto b = s.run_episodes(spec, Domain::kEvaluation, 4, 3);
    REQUIRE(a.size() == 4);
    for (std::size_t e = 0; e < 4; ++e) {
      CHECK(a[e].mean_lqr == b[e].mean_lqr);
      CHECK(a[e].delay_hist == b[e].delay_hist);
      CHECK(a[e].state_errors.position_hist == b[e].state_errors.position_hist);
    }
    CHECK(a[0].mean_lqr != a[1].mean_lqr);
    CHECK(a[0].delay_hist.size() == kDelayBuckets);
  }

  TEST_CASE("without interferers fixed power and the reference see the same world") {
    const Scenario s(small(1, 2000));
    for (std::uint64_t e = 0; e < 5; ++e) {
      const WorldKey w{11, Domain::kEvaluation, e};
      const auto a = s.run_episode(PolicySpec::parse("fixed"), w);
      const auto b = s.run_episode(PolicySpec::parse("nointerf"), w);
      CHECK(a.mean_lqr == b.mean_lqr);
      CHECK(a.delay_hist == b.delay_hist);
    }
  }

  TEST_CASE("domains and streams are distinct") {
    const WorldKey train{5, Domain::kTraining, 0}, eval{5, Domain::kEvaluation, 0}, next{5, Domain::kEvaluation, 1};
    CHECK(train.stream(Stream::kLayout)() != eval.stream(Stream::kLayout)());
    CHECK(eval.stream(Stream::kLayout)() != next.stream(Stream::kLayout)());
    CHECK(eval.stream(Stream::kLayout)() != eval.stream(Stream::kChannel)());
    CHECK(eval.stream(Stream::kProcessNoise, 0)() != eval.stream(Stream::kProcessNoise, 1)());
    CHECK(eval.stream(Stream::kLayout)() == WorldKey{5, Domain::kEvaluation, 0}.stream(Stream::kLayout)());
  }

  TEST_CASE("objectives are the mean and maximum over all plants") {
    const std::vector<EpisodeResult> rs{with_costs({1.0, 2.0}), with_costs({3.0, 10.0})};
    const auto f = objectives(rs);
    CHECK(f.f1 == doctest::Approx(4.0));
    CHECK(f.f2 == 10.0);
    CHECK_THROWS_AS(objectives(std::vector<EpisodeResult>{}), std::invalid_argument);
  }

  TEST_CASE("p99 pools every plant of every episode") {
    std::vector<EpisodeResult> rs;
    std::vector<double> flat;
    for (int e = 0; e < 4; ++e) {
      std::vector<double> costs;
      for (int i = 0; i < 25; ++i) costs.push_back(e * 25 + i + 1.0);
      rs.push_back(with_costs(costs));
    }
    // Values 1..100: numpy's linear rule puts the 0.99 level at 99.01.
    CHECK(summarize(rs).p99_mean_lqr == doctest::Approx(99.01));
    CHECK(summarize(rs).plants == 100);
    CHECK(quantile({5.0}, 0.99) == 5.0);
    CHECK(quantile({1.0, 2.0}, 0.5) == 1.5);
    CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  }

  TEST_CASE("failure rate and CCDF from the state tally") {
    FailureThresholds zero{0.0, 0.0};
    EpisodeResult r = with_costs({1.0});
    for (int i = 1; i <= 50; ++i) r.state_errors.add(1e-3 * i, 1e-2 * i, zero);
    const std::vector<EpisodeResult> rs{r};
    const auto s = summarize(rs);
    CHECK(s.failure_rate == 1.0);
    REQUIRE(s.position_ccdf.size() == s.ccdf_grid.size());
    for (std::size_t j = 1; j < s.position_ccdf.size(); ++j) {
      CHECK(s.position_ccdf[j] <= s.position_ccdf[j - 1]);
      CHECK(s.angle_ccdf[j] <= s.angle_ccdf[j - 1]);
    }
    CHECK(s.position_ccdf.front() == 1.0);
    CHECK(s.position_ccdf.back() == 0.0);
    // Exactly 10 of the 50 positions exceed 0.04 (0.041 .. 0.050).
    const auto& g = s.ccdf_grid;
    for (std::size_t j = 0; j < g.size(); ++j) {
      int expected = 0;
      for (int i = 1; i <= 50; ++i) expected += (1e-3 * i > g[j]);
      CHECK(s.position_ccdf[j] == doctest::Approx(expected / 50.0));
    }
    FailureThresholds th;
    StateErrorTally t;
    t.add(std::numeric_limits<double>::infinity(), 0.0, th);
    CHECK(t.position_exceed == 1);
    CHECK(t.angle_exceed == 0);
    CHECK(t.position_ccdf().back() == 1.0);
  }

  TEST_CASE("invalid scenarios are rejected") {
    auto cfg = small(4);
    cfg.policy = PolicySpec::parse("rr5");
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small();
    cfg.horizon = 0;
    CHECK_THROWS_AS(Scenario{cfg}, std::invalid_argument);
    cfg = small();
    cfg.sigma_w = -1.0;
    CHECK_THROWS_AS(Scenario{cfg}, std::invalid_argument);
  }

  TEST_CASE("training smoke run is deterministic and returns a front") {
    ScenarioConfig cfg = small(10, 200);
    TrainingConfig tr;
    tr.n_subnetworks = 10;
    tr.episodes = 3;
    tr.validation_episodes = 3;
    tr.motpe.trials = 20;
    tr.motpe.startup = 5;
    const auto a = train_cica(cfg, tr, 4);
    const auto b = train_cica(cfg, tr, 1);
    CHECK(a.history.size() == 25);
    REQUIRE(a.front.size() >= 1);
    CHECK(a.front_tail_costs.size() == a.front.size());
    CHECK(a.selected.k == b.selected.k);
    CHECK(a.selected.eta0 == b.selected.eta0);
    CHECK(a.selected_tail_cost == b.selected_tail_cost);
    CHECK(a.selected.nu == cfg.radio.p_max_w);
    CHECK((a.selected.k > 0.0 && a.selected.k < 1.0));
    CHECK((a.selected.eta0 > 0.0 && a.selected.eta0 < 200.0));
  }
}
