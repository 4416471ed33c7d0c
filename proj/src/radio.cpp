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

#include "cica/radio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace cica {

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

FactoryLayout deploy(std::size_t n_subnetworks, double width, double height, double radius, std::mt19937_64& rng) {
  if (n_subnetworks == 0) throw std::invalid_argument("deploy: at least one subnetwork is required");
  if (!(width > 0.0) || !(height > 0.0) || !(radius >= 0.0)) {
    throw std::invalid_argument("deploy: area and radius must be positive");
  }
  FactoryLayout layout;
  layout.width = width;
  layout.height = height;
  layout.subnetwork_radius = radius;
  layout.ap_positions.reserve(n_subnetworks);
  layout.sensor_positions.reserve(n_subnetworks);

  std::uniform_real_distribution<double> ux(0.0, width);
  std::uniform_real_distribution<double> uy(0.0, height);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 0; n < n_subnetworks; ++n) {
    const Point ap{ux(rng), uy(rng)};
    // Uniform in the disk: r = R sqrt(U).
    const double r = radius * std::sqrt(unit(rng));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    Point sensor{ap.x + r * std::cos(angle), ap.y + r * std::sin(angle)};
    sensor.x = std::clamp(sensor.x, 0.0, width);
    sensor.y = std::clamp(sensor.y, 0.0, height);
    layout.ap_positions.push_back(ap);
    layout.sensor_positions.push_back(sensor);
  }
  return layout;
}

double los_probability(double d2d, double clutter_density, double clutter_size) {
  if (!(clutter_density > 0.0 && clutter_density < 1.0)) {
    throw std::invalid_argument("los_probability: clutter density must lie in (0, 1)");
  }
  if (!(clutter_size > 0.0)) throw std::invalid_argument("los_probability: clutter size must be positive");
  if (!(d2d >= 0.0)) throw std::invalid_argument("los_probability: distance must be non-negative");
  const double k_clutter = -clutter_size / std::log(1.0 - clutter_density);
  return std::exp(-d2d / k_clutter);
}

double path_loss_db(double d, double f_ghz, bool los) {
  if (!(f_ghz > 0.0)) throw std::invalid_argument("path_loss_db: carrier must be positive");
  const double dd = std::max(d, kMinDistance);
  const double pl_los = 31.84 + 21.5 * std::log10(dd) + 19.0 * std::log10(f_ghz);
  if (los) return pl_los;
  const double pl_nlos = 18.6 + 35.7 * std::log10(dd) + 20.0 * std::log10(f_ghz);
  return std::max(pl_los, pl_nlos);
}

Eigen::MatrixXd shadowing_correlation_root(const std::vector<Point>& transmitters, double corr_distance) {
  if (!(corr_distance > 0.0)) throw std::invalid_argument("shadowing: correlation distance must be positive");
  const auto n = static_cast<Eigen::Index>(transmitters.size());
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      C(i, j) = std::exp(-distance(transmitters[i], transmitters[j]) / corr_distance);
    }
  }
  auto try_root = [](const Eigen::MatrixXd& M) -> std::optional<Eigen::MatrixXd> {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    if (eig.info() != Eigen::Success) return std::nullopt;
    const auto& lambda = eig.eigenvalues();
    if (lambda.size() > 0 && lambda.minCoeff() < -1e-8 * std::max(1.0, lambda.maxCoeff())) return std::nullopt;
    const Eigen::VectorXd root = lambda.cwiseMax(0.0).cwiseSqrt();
    return Eigen::MatrixXd(eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose());
  };
  if (auto S = try_root(C)) return *S;
  C.diagonal().array() += 1e-9;
  if (auto S = try_root(C)) return *S;
  throw std::runtime_error("shadowing: correlation matrix factorization failed");
}

Eigen::MatrixXd correlated_shadowing(const FactoryLayout& layout,
                                     const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& los,
                                     double corr_distance, double sigma_los, double sigma_nlos,
                                     std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(layout.size());
  if (los.rows() != n || los.cols() != n) throw std::invalid_argument("shadowing: LOS matrix size mismatch");
  const Eigen::MatrixXd root = shadowing_correlation_root(layout.sensor_positions, corr_distance);

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd shadow(n, n);
  Eigen::VectorXd white(n);
  for (Eigen::Index rx = 0; rx < n; ++rx) {
    for (Eigen::Index m = 0; m < n; ++m) white[m] = normal(rng);
    const Eigen::VectorXd field = root * white;
    for (Eigen::Index tx = 0; tx < n; ++tx) {
      shadow(tx, rx) = (los(tx, rx) ? sigma_los : sigma_nlos) * field[tx];
    }
  }
  return shadow;
}

ChannelRealization realize_channel(const FactoryLayout& layout, const ChannelParams& params, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(layout.size());
  if (n == 0 || layout.sensor_positions.size() != layout.ap_positions.size()) {
    throw std::invalid_argument("realize_channel: invalid layout");
  }
  ChannelRealization ch;
  ch.los.resize(n, n);
  ch.path_loss_db.resize(n, n);
  ch.gains.resize(n, n);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index tx = 0; tx < n; ++tx) {
    for (Eigen::Index rx = 0; rx < n; ++rx) {
      const double d = distance(layout.sensor_positions[tx], layout.ap_positions[rx]);
      ch.los(tx, rx) = unit(rng) < los_probability(d, params.clutter_density, params.clutter_size);
      ch.path_loss_db(tx, rx) = path_loss_db(d, params.carrier_ghz, ch.los(tx, rx));
    }
  }

  ch.shadowing_db = params.shadowing
                        ? correlated_shadowing(layout, ch.los, params.corr_distance, params.shadowing_std_los,
                                               params.shadowing_std_nlos, rng)
                        : Eigen::MatrixXd::Zero(n, n);

  // h ~ CN(0, 1): independent real/imaginary parts with variance 1/2.
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  for (Eigen::Index tx = 0; tx < n; ++tx) {
    for (Eigen::Index rx = 0; rx < n; ++rx) {
      std::complex<double> h{1.0, 0.0};
      if (params.fading) {
        const double re = half(rng);
        const double im = half(rng);
        h = {re, im};
      }
      const double gain_db = -ch.path_loss_db(tx, rx) + ch.shadowing_db(tx, rx);
      ch.gains(tx, rx) = h * std::sqrt(std::pow(10.0, gain_db / 10.0));
    }
  }
  return ch;
}

void write_channel_csv(const ChannelRealization& channel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "tx,rx,los,path_loss_db,shadowing_db,gain_re,gain_im,gain_db\n";
  const auto n = static_cast<Eigen::Index>(channel.size());
  for (Eigen::Index tx = 0; tx < n; ++tx) {
    for (Eigen::Index rx = 0; rx < n; ++rx) {
      const auto g = channel.gains(tx, rx);
      out << tx << ',' << rx << ',' << (channel.los(tx, rx) ? 1 : 0) << ',' << channel.path_loss_db(tx, rx) << ','
          << channel.shadowing_db(tx, rx) << ',' << g.real() << ',' << g.imag() << ','
          << 10.0 * std::log10(std::norm(g)) << '\n';
    }
  }
}

}  // namespace cica
