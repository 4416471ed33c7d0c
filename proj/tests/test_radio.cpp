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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "cica/radio.hpp"

using namespace cica;

namespace {

FactoryLayout two_sensors(Point a, Point b) {
  FactoryLayout layout;
  layout.ap_positions = {Point{10, 10}, Point{10, 10}};
  layout.sensor_positions = {a, b};
  return layout;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_SUITE("radio") {
  TEST_CASE("single subnetwork deployment") {
    std::mt19937_64 rng(1);
    const auto layout = deploy(1, 20, 20, 2, rng);
    REQUIRE(layout.size() == 1);
    CHECK(distance(layout.ap_positions[0], layout.sensor_positions[0]) <= 2.0);
  }

  TEST_CASE("deployment invariants and reproducibility") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      std::mt19937_64 rng(seed), again(seed);
      const auto layout = deploy(30, 20, 20, 2, rng);
      const auto copy = deploy(30, 20, 20, 2, again);
      REQUIRE(layout.size() == 30);
      for (std::size_t n = 0; n < 30; ++n) {
        const auto& ap = layout.ap_positions[n];
        const auto& s = layout.sensor_positions[n];
        CHECK(distance(ap, s) <= 2.0 + 1e-12);
        CHECK((ap.x >= 0 && ap.x <= 20 && ap.y >= 0 && ap.y <= 20));
        CHECK((s.x >= 0 && s.x <= 20 && s.y >= 0 && s.y <= 20));
        CHECK(s.x == copy.sensor_positions[n].x);
        CHECK(ap.y == copy.ap_positions[n].y);
      }
    }
  }

  TEST_CASE("empty deployment is rejected") {
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(deploy(0, 20, 20, 2, rng), std::invalid_argument);
  }

  TEST_CASE("LOS probability") {
    CHECK(los_probability(0.0, 0.6, 2.0) == 1.0);
    const double k = -2.0 / std::log(0.4);
    CHECK(k == doctest::Approx(2.183).epsilon(1e-3));
    CHECK(los_probability(k, 0.6, 2.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(los_probability(1e4, 0.6, 2.0) < 1e-300);
    CHECK_THROWS_AS(los_probability(1.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(los_probability(1.0, 0.6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(los_probability(-1.0, 0.6, 2.0), std::invalid_argument);
  }

  TEST_CASE("path loss values, ordering and floor") {
    CHECK(path_loss_db(1.0, 6.0, true) == doctest::Approx(31.84 + 19.0 * std::log10(6.0)));
    CHECK(path_loss_db(1.0, 6.0, true) == doctest::Approx(46.62).epsilon(1e-3));
    CHECK(path_loss_db(0.1, 6.0, true) == path_loss_db(1.0, 6.0, true));
    double prev_los = 0.0, prev_nlos = 0.0;
    for (double d = 0.5; d < 40.0; d += 0.25) {
      const double los = path_loss_db(d, 6.0, true);
      const double nlos = path_loss_db(d, 6.0, false);
      CHECK(nlos >= los);
      CHECK(los >= prev_los);
      CHECK(nlos >= prev_nlos);
      prev_los = los;
      prev_nlos = nlos;
    }
    CHECK(path_loss_db(10.0, 6.0, false) == doctest::Approx(18.6 + 35.7 + 20.0 * std::log10(6.0)));
  }

  TEST_CASE("co-located transmitters share their shadowing") {
    const auto layout = two_sensors({5, 5}, {5, 5});
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> los = decltype(los)::Constant(2, 2, true);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
      const auto s = correlated_shadowing(layout, los, 10.0, 4.0, 7.2, rng);
      CHECK(s(0, 0) == doctest::Approx(s(1, 0)).epsilon(1e-6));
      CHECK(s(0, 1) == doctest::Approx(s(1, 1)).epsilon(1e-6));
    }
  }

  TEST_CASE("shadowing moments and decorrelation with distance") {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> los(2, 2);
    los << true, false, true, false;
    std::mt19937_64 rng(9);
    const auto far = two_sensors({0, 0}, {400, 0});
    const auto near = two_sensors({0, 0}, {5, 0});
    std::vector<double> a, b, c, d;
    for (int i = 0; i < 10000; ++i) {
      const auto s = correlated_shadowing(far, los, 10.0, 4.0, 7.2, rng);
      a.push_back(s(0, 0));
      b.push_back(s(1, 0));
      const auto t = correlated_shadowing(near, los, 10.0, 4.0, 7.2, rng);
      c.push_back(t(0, 1));
      d.push_back(t(1, 1));
    }
    CHECK(std::abs(pearson(a, b)) < 0.05);
    CHECK(pearson(c, d) == doctest::Approx(std::exp(-0.5)).epsilon(0.05));
    auto stdev = [](const std::vector<double>& v) {
      double m = 0, s = 0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      for (double x : v) s += (x - m) * (x - m);
      return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    CHECK(stdev(a) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(stdev(c) == doctest::Approx(7.2).epsilon(0.05));
  }

  TEST_CASE("correlation root squares back to the correlation matrix") {
    std::mt19937_64 rng(2);
    const auto layout = deploy(12, 20, 20, 2, rng);
    const auto S = shadowing_correlation_root(layout.sensor_positions, 10.0);
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        const double c = std::exp(-distance(layout.sensor_positions[i], layout.sensor_positions[j]) / 10.0);
        CHECK((S * S)(i, j) == doctest::Approx(c).epsilon(1e-9));
      }
    }
    CHECK_THROWS_AS(shadowing_correlation_root(layout.sensor_positions, 0.0), std::invalid_argument);
  }

  TEST_CASE("without shadowing and fading the gain is the path loss") {
    std::mt19937_64 rng(5);
    const auto layout = deploy(6, 20, 20, 2, rng);
    ChannelParams p;
    p.shadowing = false;
    p.fading = false;
    const auto ch = realize_channel(layout, p, rng);
    const auto g = ch.power_gains();
    for (int m = 0; m < 6; ++m) {
      for (int n = 0; n < 6; ++n) {
        CHECK(g(m, n) == doctest::Approx(std::pow(10.0, -ch.path_loss_db(m, n) / 10.0)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("Rayleigh fading has unit mean power") {
    ChannelParams p;
    p.shadowing = false;
    std::mt19937_64 rng(6);
    const auto layout = deploy(10, 20, 20, 2, rng);
    double acc = 0.0;
    int count = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto ch = realize_channel(layout, p, rng);
      const auto g = ch.power_gains();
      for (int m = 0; m < 10; ++m) {
        for (int n = 0; n < 10; ++n) {
          acc += g(m, n) / std::pow(10.0, -ch.path_loss_db(m, n) / 10.0);
          ++count;
        }
      }
    }
    CHECK(count == 10000);
    CHECK(acc / count == doctest::Approx(1.0).epsilon(0.03));
  }

  TEST_CASE("same seed gives a bit-identical channel; all gains finite and positive") {
    ChannelParams p;
    std::mt19937_64 r1(77), r2(77);
    const auto l1 = deploy(30, 20, 20, 2, r1);
    const auto l2 = deploy(30, 20, 20, 2, r2);
    const auto c1 = realize_channel(l1, p, r1);
    const auto c2 = realize_channel(l2, p, r2);
    CHECK(c1.gains == c2.gains);
    const auto g = c1.power_gains();
    CHECK(g.allFinite());
    CHECK(g.minCoeff() > 0.0);
  }

  TEST_CASE("desired links beat a 15 m interferer and are more often LOS") {
    ChannelParams p;
    std::mt19937_64 rng(8);
    std::vector<double> desired, cross;
    int los_desired = 0, los_cross = 0;
    for (int rep = 0; rep < 2000; ++rep) {
      FactoryLayout layout;
      layout.ap_positions = {Point{2, 10}, Point{17, 10}};
      layout.sensor_positions = {Point{3.5, 10}, Point{17.5, 10}};
      const auto ch = realize_channel(layout, p, rng);
      const auto g = ch.power_gains();
      desired.push_back(g(0, 0));
      cross.push_back(g(1, 0));
      los_desired += ch.los(0, 0);
      los_cross += ch.los(1, 0);
    }
    std::sort(desired.begin(), desired.end());
    std::sort(cross.begin(), cross.end());
    for (std::size_t q = 100; q < 2000; q += 100) CHECK(desired[q] > cross[q]);
    CHECK(los_desired > 5 * los_cross);
  }

  TEST_CASE("channel dump has one row per link") {
    std::mt19937_64 rng(1);
    const auto layout = deploy(3, 20, 20, 2, rng);
    const auto ch = realize_channel(layout, ChannelParams{}, rng);
    const std::string path = "radio_channel_dump.csv";
    write_channel_csv(ch, path);
    std::ifstream in(path);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 10);
    std::remove(path.c_str());
  }
}
