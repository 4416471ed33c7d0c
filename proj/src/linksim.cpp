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

#include "cica/linksim.hpp"

#include <cmath>
#include <stdexcept>

namespace cica {
namespace {

// Floating-point slack when deciding that a packet has been fully sent.
constexpr double kBitSlack = 1e-9;

}  // namespace

void RadioParams::validate() const {
  if (!(bandwidth_hz > 0.0) || !(p_max_w > 0.0) || !(temperature_k > 0.0) || !(tti_s > 0.0) ||
      !std::isfinite(noise_figure_db)) {
    throw std::invalid_argument("radio parameters must be positive and finite");
  }
}

double noise_power(const RadioParams& params) {
  return kBoltzmann * params.temperature_k * params.bandwidth_hz * std::pow(10.0, params.noise_figure_db / 10.0);
}

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::vector<double> rates(std::span<const double> powers, const Eigen::MatrixXd& power_gains,
                          const std::vector<bool>& active, const RadioParams& params, bool interference_free) {
  const std::size_t n = powers.size();
  if (static_cast<std::size_t>(power_gains.rows()) != n || static_cast<std::size_t>(power_gains.cols()) != n ||
      active.size() != n) {
    throw std::invalid_argument("rates: dimension mismatch");
  }
  const double sigma2 = noise_power(params);
  std::vector<double> out(n, 0.0);
  for (std::size_t rx = 0; rx < n; ++rx) {
    if (!active[rx]) continue;
    double interference = 0.0;
    if (!interference_free) {
      for (std::size_t tx = 0; tx < n; ++tx) {
        if (tx != rx && active[tx]) interference += powers[tx] * power_gains(tx, rx);
      }
    }
    const double sinr = powers[rx] * power_gains(rx, rx) / (interference + sigma2);
    out[rx] = params.bandwidth_hz * std::log2(1.0 + sinr);
  }
  return out;
}

std::vector<double> rates(std::span<const double> powers, const ChannelRealization& channel,
                          const std::vector<bool>& active, const RadioParams& params, bool interference_free) {
  return rates(powers, channel.power_gains(), active, params, interference_free);
}

TransmitBuffer::TransmitBuffer(double packet_bits, std::int64_t period_steps, std::size_t capacity)
    : packet_bits_(packet_bits), period_(period_steps), capacity_(capacity) {
  if (!(packet_bits > 0.0)) throw std::invalid_argument("packet size must be positive");
  if (period_steps < 1) throw std::invalid_argument("traffic period must be at least one step");
}

bool TransmitBuffer::enqueue_if_due(std::int64_t now, const Vector& state) {
  if (now % period_ != 0) return false;
  enqueue(now, state);
  return true;
}

void TransmitBuffer::enqueue(std::int64_t now, const Vector& state) {
  if (capacity_ > 0 && queue_.size() >= capacity_) {
    bits_dropped_ += queue_.front().remaining_bits;
    queue_.pop_front();
  }
  queue_.push_back(Packet{now, packet_bits_, packet_bits_, state});
  bits_enqueued_ += packet_bits_;
}

double TransmitBuffer::remaining_bits() const {
  double total = 0.0;
  for (const auto& p : queue_) total += p.remaining_bits;
  return total;
}

void TransmitBuffer::transmit(double budget_bits, std::size_t subnetwork, std::int64_t now,
                              std::vector<DeliveryEvent>& events) {
  while (budget_bits > 0.0 && !queue_.empty()) {
    Packet& head = queue_.front();
    const double sent = std::min(budget_bits, head.remaining_bits);
    head.remaining_bits -= sent;
    budget_bits -= sent;
    bits_transmitted_ += sent;
    if (head.remaining_bits > kBitSlack) break;
    bits_transmitted_ += head.remaining_bits;
    budget_bits -= head.remaining_bits;
    events.push_back(DeliveryEvent{subnetwork, head.generated_at, now, std::move(head.payload)});
    queue_.pop_front();
  }
}

std::vector<DeliveryEvent> advance_buffers(std::vector<TransmitBuffer>& buffers, std::span<const double> rates_bps,
                                           std::span<const double> slot_fraction, std::int64_t now,
                                           const RadioParams& params) {
  if (rates_bps.size() != buffers.size() || slot_fraction.size() != buffers.size()) {
    throw std::invalid_argument("advance_buffers: dimension mismatch");
  }
  std::vector<DeliveryEvent> events;
  for (std::size_t n = 0; n < buffers.size(); ++n) {
    const double budget = rates_bps[n] * params.tti_s * slot_fraction[n];
    if (budget > 0.0) buffers[n].transmit(budget, n, now, events);
  }
  return events;
}

std::optional<DelayedObservation> freshest_delivery(std::span<const DeliveryEvent> events, std::size_t subnetwork,
                                                    const Vector& measurement_noise) {
  const DeliveryEvent* best = nullptr;
  for (const auto& e : events) {
    if (e.subnetwork != subnetwork) continue;
    if (best == nullptr || e.delay() < best->delay()) best = &e;
  }
  if (best == nullptr) return std::nullopt;
  return DelayedObservation{best->payload + measurement_noise, best->delay()};
}

}  // namespace cica
