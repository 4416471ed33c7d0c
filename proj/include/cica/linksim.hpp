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
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cica/plant.hpp"
#include "cica/radio.hpp"

namespace cica {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

struct RadioParams {
  double bandwidth_hz = 3e6;
  double p_max_w = 1e-3;  // 0 dBm
  double noise_figure_db = 10.0;
  double temperature_k = 290.0;
  double tti_s = 1e-3;

  void validate() const;
};

/// Thermal noise power k T B 10^(NF/10) in watts.
double noise_power(const RadioParams& params);

double watts_to_dbm(double watts);
double dbm_to_watts(double dbm);

/// Shannon rate (bits/s) of every subnetwork for the given powers.
/// Inactive subnetworks neither transmit nor interfere and get rate 0.
/// With `interference_free` the cross terms are dropped entirely.
std::vector<double> rates(std::span<const double> powers, const ChannelRealization& channel,
                          const std::vector<bool>& active, const RadioParams& params,
                          bool interference_free = false);

/// Same computation on a precomputed |gamma|^2 matrix (entry (m, n): m -> n).
std::vector<double> rates(std::span<const double> powers, const Eigen::MatrixXd& power_gains,
                          const std::vector<bool>& active, const RadioParams& params,
                          bool interference_free = false);

struct Packet {
  std::int64_t generated_at = 0;
  double size_bits = 0.0;
  double remaining_bits = 0.0;
  Vector payload;  // plant state sampled at generation
};

struct DeliveryEvent {
  std::size_t subnetwork = 0;
  std::int64_t generated_at = 0;
  std::int64_t delivered_at = 0;
  Vector payload;

  std::int64_t delay() const { return delivered_at - generated_at; }
};

/// FIFO uplink buffer of one sensor transmitter.
class TransmitBuffer {
 public:
  /// `capacity` == 0 means unbounded; otherwise enqueueing into a full
  /// buffer evicts the oldest packet.
  TransmitBuffer(double packet_bits = 1024.0, std::int64_t period_steps = 2, std::size_t capacity = 0);

  /// Enqueues a fresh packet when `now` is a multiple of the period.
  bool enqueue_if_due(std::int64_t now, const Vector& state);
  void enqueue(std::int64_t now, const Vector& state);

  const std::deque<Packet>& queue() const { return queue_; }
  std::size_t size() const { return queue_.size(); }
  double packet_bits() const { return packet_bits_; }
  std::int64_t period() const { return period_; }
  double remaining_bits() const;

  double bits_enqueued() const { return bits_enqueued_; }
  double bits_transmitted() const { return bits_transmitted_; }
  double bits_dropped() const { return bits_dropped_; }
  std::size_t capacity() const { return capacity_; }

  /// Sends up to `budget_bits` head-first and appends one event per
  /// completed packet, tagged with `subnetwork`.
  void transmit(double budget_bits, std::size_t subnetwork, std::int64_t now, std::vector<DeliveryEvent>& events);

 private:
  double packet_bits_;
  std::int64_t period_;
  std::size_t capacity_;
  std::deque<Packet> queue_;
  double bits_enqueued_ = 0.0;
  double bits_transmitted_ = 0.0;
  double bits_dropped_ = 0.0;
};

/// Drains `rate * tti * slot_fraction` bits from each buffer head-first.
/// Any residual after a completed packet rolls into the next one. Returns
/// one event per completed packet.
std::vector<DeliveryEvent> advance_buffers(std::vector<TransmitBuffer>& buffers, std::span<const double> rates_bps,
                                           std::span<const double> slot_fraction, std::int64_t now,
                                           const RadioParams& params);

/// Freshest delivered packet for `subnetwork`, with `measurement_noise`
/// added to its payload. Empty when nothing was delivered this step.
std::optional<DelayedObservation> freshest_delivery(std::span<const DeliveryEvent> events, std::size_t subnetwork,
                                                    const Vector& measurement_noise);

}  // namespace cica
