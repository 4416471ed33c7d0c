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
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cica/linksim.hpp"

namespace cica {

/// Transmit decision for one TTI.
struct PolicyDecision {
  std::vector<double> powers;  // W
  std::vector<bool> active;
  double slot_fraction = 1.0;  // share of the TTI each active subnetwork transmits
  bool interference_free = false;

  std::size_t size() const { return powers.size(); }
};

/// Logistic power map p = nu / (1 + exp(-k (eta - eta0))).
struct CicaParams {
  double k = 0.12;
  double eta0 = 56.0;
  double nu = 1e-3;

  void validate() const;
  double power(double eta) const;
};

/// Channel-independent control-aware allocation: each subnetwork's power
/// depends only on its own plant's LQR cost.
PolicyDecision cica(std::span<const double> etas, const CicaParams& params);

/// Every subnetwork transmits at `power`. Throws if power is outside [0, p_max].
PolicyDecision fixed_power(std::size_t n, double power, double p_max);

struct MprConfig {
  int starts = 5;
  int iterations = 200;
  double epsilon_fraction = 1e-6;  // lower power bound as a fraction of p_max
};

/// Sum of ln(rate) over all subnetworks, i.e. the log of the rate product.
double log_rate_product(std::span<const double> powers, const Eigen::MatrixXd& power_gains, const RadioParams& params);

/// Gradient of log_rate_product with respect to the powers.
std::vector<double> log_rate_product_gradient(std::span<const double> powers, const Eigen::MatrixXd& power_gains,
                                              const RadioParams& params);

/// Max-product-rate benchmark: projected gradient ascent on the log rate
/// product over [eps, p_max]^N with backtracking, multi-start. The first
/// start is the all-p_max point, so the result never scores below fixed
/// full power.
PolicyDecision max_prod_rate(const Eigen::MatrixXd& power_gains, const RadioParams& params, const MprConfig& cfg,
                             std::mt19937_64& rng);

/// `slots` subnetworks drawn uniformly without replacement, each sending at
/// p_max in its own 1/slots sub-slot (so without mutual interference).
PolicyDecision round_robin(std::size_t n, std::size_t slots, double p_max, std::mt19937_64& rng);

/// Reference case: everyone at p_max with cross-link interference ignored.
PolicyDecision no_interference(std::size_t n, double p_max);

enum class PolicyKind { kCica, kFixed, kMaxProdRate, kRoundRobin, kNoInterference };

struct PolicySpec {
  PolicyKind kind = PolicyKind::kCica;
  CicaParams cica;
  double fixed_power_w = 1e-3;
  std::size_t rr_slots = 10;
  MprConfig mpr;
  bool mpr_per_tti = false;

  /// Short label: cica, fixed, mpr, rr<I>, nointerf.
  std::string label() const;
  /// Parses a label produced by label(); throws std::invalid_argument.
  static PolicySpec parse(const std::string& label);
};

/// Per-episode policy state (MPR caches its solution because the channel
/// is static).
class PolicyRunner {
 public:
  PolicyRunner(PolicySpec spec, const RadioParams& radio);

  void begin_episode(const ChannelRealization& channel, std::mt19937_64& rng);
  /// `etas` are the most recent instantaneous LQR costs.
  const PolicyDecision& decide(std::int64_t now, std::span<const double> etas, std::mt19937_64& rng);

  const PolicySpec& spec() const { return spec_; }

 private:
  PolicySpec spec_;
  RadioParams radio_;
  Eigen::MatrixXd power_gains_;
  PolicyDecision decision_;
};

}  // namespace cica
