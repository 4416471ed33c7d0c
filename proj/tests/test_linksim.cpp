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
#include <random>
#include <vector>

#include "cica/linksim.hpp"

using namespace cica;

namespace {

Vector tag(double v) { return Vector::Constant(1, v); }

std::vector<bool> all_active(std::size_t n) { return std::vector<bool>(n, true); }

}  // namespace

TEST_SUITE("linksim") {
  TEST_CASE("thermal noise power") {
    const RadioParams p;
    // k T B = 1.380649e-23 * 290 * 3e6, times 10 for the noise figure.
    CHECK(noise_power(p) == doctest::Approx(1.380649e-23 * 290.0 * 3e6 * 10.0));
    CHECK(noise_power(p) == doctest::Approx(1.20e-13).epsilon(0.005));
    CHECK(watts_to_dbm(noise_power(p)) == doctest::Approx(-99.2).epsilon(0.05 / 99.2));
    RadioParams nf0 = p;
    nf0.noise_figure_db = 0.0;
    CHECK(noise_power(nf0) == doctest::Approx(noise_power(p) / 10.0));
    RadioParams wide = p;
    wide.bandwidth_hz *= 2.0;
    CHECK(noise_power(wide) == doctest::Approx(2.0 * noise_power(p)));
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
  }

  TEST_CASE("one packet per TTI needs 0.34 bits/s/Hz") {
    const RadioParams p;
    const double spectral_efficiency = 1024.0 / p.tti_s / p.bandwidth_hz;
    CHECK(spectral_efficiency == doctest::Approx(0.34).epsilon(0.01 / 0.34));
  }

  TEST_CASE("single active link is interference free") {
    const RadioParams p;
    Eigen::MatrixXd g(2, 2);
    g << 1e-6, 1e-3, 1e-3, 1e-6;
    const std::vector<double> pw{1e-3, 1e-3};
    const auto r = rates(pw, g, {true, false}, p);
    CHECK(r[0] == doctest::Approx(p.bandwidth_hz * std::log2(1.0 + 1e-9 / noise_power(p))));
    CHECK(r[1] == 0.0);
  }

  TEST_CASE("zero power gives zero rates") {
    const RadioParams p;
    const Eigen::MatrixXd g = Eigen::MatrixXd::Constant(3, 3, 1e-6);
    for (double v : rates(std::vector<double>(3, 0.0), g, all_active(3), p)) CHECK(v == 0.0);
  }

  TEST_CASE("two-link SINR matches hand computation") {
    const RadioParams p;
    Eigen::MatrixXd g(2, 2);
    g << 1e-6, 1e-8, 1e-8, 1e-6;
    const std::vector<double> pw{1e-3, 1e-3};
    const double sigma2 = 1.380649e-23 * 290.0 * 3e6 * 10.0;
    const double sinr = (1e-3 * 1e-6) / (1e-3 * 1e-8 + sigma2);
    const auto r = rates(pw, g, all_active(2), p);
    CHECK(sinr == doctest::Approx(98.8131).epsilon(1e-5));
    CHECK(r[0] == doctest::Approx(3e6 * std::log2(1.0 + sinr)).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(r[0]).epsilon(1e-12));
    const auto free = rates(pw, g, all_active(2), p, true);
    CHECK(free[0] == doctest::Approx(3e6 * std::log2(1.0 + 1e-9 / sigma2)));
  }

  TEST_CASE("rates are monotone in interferer power and permutation equivariant") {
    const RadioParams p;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ug(-100.0, -50.0), up(0.0, 1e-3);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 6;
      Eigen::MatrixXd g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = std::pow(10.0, ug(rng) / 10.0);
      std::vector<double> pw(n);
      for (auto& x : pw) x = up(rng);
      const auto base = rates(pw, g, all_active(n), p);
      auto louder = pw;
      louder[2] = 1e-3;
      const auto after = rates(louder, g, all_active(n), p);
      for (int i = 0; i < n; ++i) {
        if (i != 2) CHECK(after[i] <= base[i]);
      }
      // Relabel subnetworks with a cyclic shift.
      Eigen::MatrixXd gp(n, n);
      std::vector<double> pp(n);
      for (int i = 0; i < n; ++i) {
        pp[(i + 1) % n] = pw[i];
        for (int j = 0; j < n; ++j) gp((i + 1) % n, (j + 1) % n) = g(i, j);
      }
      const auto shifted = rates(pp, gp, all_active(n), p);
      for (int i = 0; i < n; ++i) CHECK(shifted[(i + 1) % n] == doctest::Approx(base[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("rates reject mismatched dimensions") {
    const RadioParams p;
    CHECK_THROWS_AS(rates(std::vector<double>(2, 0.0), Eigen::MatrixXd::Zero(3, 3), all_active(2), p),
                    std::invalid_argument);
  }

  TEST_CASE("periodic traffic") {
    TransmitBuffer b(1024.0, 2);
    int enqueued = 0;
    for (std::int64_t t = 0; t < 10; ++t) enqueued += b.enqueue_if_due(t, tag(double(t)));
    CHECK(enqueued == 5);
    CHECK(b.size() == 5);
    CHECK(b.queue().front().generated_at == 0);
    CHECK(b.queue().back().generated_at == 8);
    CHECK_THROWS_AS(TransmitBuffer(0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(TransmitBuffer(1024.0, 0), std::invalid_argument);
  }

  TEST_CASE("1.024 Mbps delivers a packet in exactly one TTI") {
    const RadioParams p;
    std::vector<TransmitBuffer> bufs(1);
    bufs[0].enqueue(0, tag(1.0));
    const std::vector<double> r{1.024e6}, slot{1.0};
    const auto ev = advance_buffers(bufs, r, slot, 0, p);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].delay() == 0);
    CHECK(bufs[0].size() == 0);
  }

  TEST_CASE("rate zero makes no progress while traffic accumulates") {
    const RadioParams p;
    std::vector<TransmitBuffer> bufs(1);
    const std::vector<double> r{0.0}, slot{1.0};
    for (std::int64_t t = 0; t < 20; ++t) {
      bufs[0].enqueue_if_due(t, tag(0.0));
      CHECK(advance_buffers(bufs, r, slot, t, p).empty());
    }
    CHECK(bufs[0].size() == 10);
    CHECK(bufs[0].remaining_bits() == 10 * 1024.0);
  }

  TEST_CASE("2.048 Mbps clears two queued packets with distinct delays") {
    const RadioParams p;
    std::vector<TransmitBuffer> bufs(1);
    bufs[0].enqueue(0, tag(0.0));
    bufs[0].enqueue(2, tag(2.0));
    const std::vector<double> r{2.048e6}, slot{1.0};
    const auto ev = advance_buffers(bufs, r, slot, 3, p);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].delay() == 3);
    CHECK(ev[1].delay() == 1);
    CHECK(bufs[0].bits_transmitted() == doctest::Approx(2048.0));
  }

  TEST_CASE("residual budget rolls into the next packet") {
    const RadioParams p;
    std::vector<TransmitBuffer> bufs(1);
    bufs[0].enqueue(0, tag(0.0));
    bufs[0].enqueue(0, tag(0.0));
    const std::vector<double> r{1.536e6}, slot{1.0};
    const auto ev = advance_buffers(bufs, r, slot, 0, p);
    CHECK(ev.size() == 1);
    CHECK(bufs[0].queue().front().remaining_bits == doctest::Approx(512.0));
  }

  TEST_CASE("slot fraction scales the budget") {
    const RadioParams p;
    std::vector<TransmitBuffer> bufs(1);
    bufs[0].enqueue(0, tag(0.0));
    const std::vector<double> r{1.024e6}, slot{0.5};
    CHECK(advance_buffers(bufs, r, slot, 0, p).empty());
    CHECK(advance_buffers(bufs, r, slot, 1, p).size() == 1);
  }

  TEST_CASE("bit conservation over random rates") {
    const RadioParams p;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ur(0.0, 1.2e6);
    std::vector<TransmitBuffer> bufs(4);
    std::vector<double> delivered(4, 0.0), slot(4, 1.0), r(4);
    for (std::int64_t t = 0; t < 3000; ++t) {
      for (auto& b : bufs) b.enqueue_if_due(t, tag(double(t)));
      for (auto& x : r) x = ur(rng);
      for (const auto& e : advance_buffers(bufs, r, slot, t, p)) {
        delivered[e.subnetwork] += 1024.0;
        CHECK(e.delay() >= 0);
        CHECK(e.payload(0) == double(e.generated_at));
      }
    }
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(bufs[i].bits_enqueued() - bufs[i].remaining_bits() == doctest::Approx(bufs[i].bits_transmitted()));
      const double partial = bufs[i].size() > 0 ? 1024.0 - bufs[i].queue().front().remaining_bits : 0.0;
      CHECK(delivered[i] + partial == doctest::Approx(bufs[i].bits_transmitted()));
    }
  }

  TEST_CASE("delay never beats the interference-free channel") {
    // At most r * TTI bits move per step, so a packet generated at t is
    // complete no earlier than step t + ceil(size / (r TTI)) - 1.
    const RadioParams p;
    for (double r : {2e5, 3.3e5, 5.12e5, 7e5, 1.024e6, 3e6}) {
      std::vector<TransmitBuffer> bufs(1);
      const std::vector<double> rate{r}, slot{1.0};
      const auto bound = static_cast<std::int64_t>(std::ceil(1024.0 / (r * p.tti_s))) - 1;
      for (std::int64_t t = 0; t < 200; ++t) {
        bufs[0].enqueue_if_due(t, tag(0.0));
        for (const auto& e : advance_buffers(bufs, rate, slot, t, p)) CHECK(e.delay() >= bound);
      }
    }
  }

  TEST_CASE("bounded buffer evicts the oldest packet") {
    TransmitBuffer b(1024.0, 2, 2);
    b.enqueue(0, tag(0.0));
    b.enqueue(2, tag(2.0));
    b.enqueue(4, tag(4.0));
    CHECK(b.size() == 2);
    CHECK(b.queue().front().generated_at == 2);
    CHECK(b.bits_dropped() == 1024.0);
  }

  TEST_CASE("freshest delivery") {
    const Vector noise = Vector::Constant(1, 0.5);
    std::vector<DeliveryEvent> events;
    CHECK_FALSE(freshest_delivery(events, 0, noise).has_value());
    events.push_back(DeliveryEvent{0, 7, 10, tag(7.0)});
    auto one = freshest_delivery(events, 0, noise);
    REQUIRE(one);
    CHECK(one->delay == 3);
    CHECK(one->x_observed(0) == 7.5);
    events.push_back(DeliveryEvent{1, 9, 10, tag(9.0)});
    events.push_back(DeliveryEvent{0, 9, 10, tag(9.0)});
    auto best = freshest_delivery(events, 0, noise);
    REQUIRE(best);
    CHECK(best->delay == 1);
    CHECK(best->x_observed(0) == 9.5);
    CHECK_FALSE(freshest_delivery(events, 2, noise).has_value());
  }
}
