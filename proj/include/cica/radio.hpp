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

#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cica {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct FactoryLayout {
  double width = 20.0;   // m
  double height = 20.0;  // m
  double subnetwork_radius = 2.0;
  std::vector<Point> ap_positions;
  std::vector<Point> sensor_positions;

  std::size_t size() const { return ap_positions.size(); }
};

/// Large- and small-scale channel parameters. Defaults follow the
/// indoor-factory dense-clutter (InF-DL) setting at 6 GHz.
struct ChannelParams {
  double area_width = 20.0;
  double area_height = 20.0;
  double subnetwork_radius = 2.0;
  double carrier_ghz = 6.0;
  double clutter_density = 0.6;
  double clutter_size = 2.0;       // m
  double corr_distance = 10.0;     // m
  double shadowing_std_los = 4.0;  // dB
  double shadowing_std_nlos = 7.2; // dB
  bool shadowing = true;
  bool fading = true;
};

/// Static per-episode channel. Entry (m, n) is the gain from the
/// transmitter (sensor) of subnetwork m to the AP of subnetwork n; the
/// diagonal holds the desired links.
struct ChannelRealization {
  Eigen::MatrixXcd gains;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> los;
  Eigen::MatrixXd shadowing_db;
  Eigen::MatrixXd path_loss_db;

  std::size_t size() const { return static_cast<std::size_t>(gains.rows()); }
  /// |gamma_{m,n}|^2 as a real matrix.
  Eigen::MatrixXd power_gains() const { return gains.cwiseAbs2(); }
};

/// APs i.i.d. uniform over the area; each sensor uniform in the disk of
/// `radius` around its AP, clipped to the area. Throws on n == 0.
FactoryLayout deploy(std::size_t n_subnetworks, double width, double height, double radius, std::mt19937_64& rng);

/// P_LOS = exp(-d / k), k = -clutter_size / ln(1 - clutter_density).
double los_probability(double d2d, double clutter_density, double clutter_size);

/// Distances below this are floored before evaluating path loss.
inline constexpr double kMinDistance = 1.0;

/// Alpha-beta-gamma path loss in dB (InF-DL coefficients). NLOS is floored
/// at the LOS value.
double path_loss_db(double d, double f_ghz, bool los);

/// Per-receiver Gaussian shadowing field over transmitter positions with
/// correlation exp(-dist / corr_distance). Entry (m, n) is scaled by the
/// LOS/NLOS standard deviation of link (m, n).
Eigen::MatrixXd correlated_shadowing(const FactoryLayout& layout,
                                     const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& los,
                                     double corr_distance, double sigma_los, double sigma_nlos,
                                     std::mt19937_64& rng);

/// Symmetric square root S of the transmitter correlation matrix (S S = C).
/// A failed decomposition is retried once with 1e-9 diagonal jitter.
Eigen::MatrixXd shadowing_correlation_root(const std::vector<Point>& transmitters, double corr_distance);

ChannelRealization realize_channel(const FactoryLayout& layout, const ChannelParams& params, std::mt19937_64& rng);

/// Writes one row per link: tx, rx, los, path_loss_db, shadowing_db, gain_re, gain_im, gain_db.
void write_channel_csv(const ChannelRealization& channel, const std::string& path);

}  // namespace cica
