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

#include "cica/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cica {

void CicaParams::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("CICA steepness k must be positive");
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw std::invalid_argument("CICA midpoint eta0 must be positive");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("CICA supremum nu must be positive");
}

double CicaParams::power(double eta) const {
  return nu / (1.0 + std::exp(-k * (eta - eta0)));
}

PolicyDecision cica(std::span<const double> etas, const CicaParams& params) {
  PolicyDecision d;
  d.powers.reserve(etas.size());
  for (double eta : etas) d.powers.push_back(params.power(eta));
  d.active.assign(etas.size(), true);
  return d;
}

PolicyDecision fixed_power(std::size_t n, double power, double p_max) {
  if (!(power >= 0.0) || power > p_max) throw std::invalid_argument("fixed power must lie in [0, p_max]");
  return PolicyDecision{std::vector<double>(n, power), std::vector<bool>(n, true), 1.0, false};
}

double log_rate_product(std::span<const double> powers, const Eigen::MatrixXd& power_gains, const RadioParams& params) {
  const auto r = rates(powers, power_gains, std::vector<bool>(powers.size(), true), params);
  double total = 0.0;
  for (double v : r) total += std::log(v);
  return total;
}

std::vector<double> log_rate_product_gradient(std::span<const double> powers, const Eigen::MatrixXd& power_gains,
                                              const RadioParams& params) {
  const std::size_t n = powers.size();
  const double sigma2 = noise_power(params);
  std::vector<double> grad(n, 0.0);
  for (std::size_t rx = 0; rx < n; ++rx) {
    double denom = sigma2;
    for (std::size_t tx = 0; tx < n; ++tx) {
      if (tx != rx) denom += powers[tx] * power_gains(tx, rx);
    }
    const double sinr = powers[rx] * power_gains(rx, rx) / denom;
    // d ln(log2(1 + s)) / ds
    const double c = 1.0 / ((1.0 + sinr) * std::log1p(sinr));
    grad[rx] += c * power_gains(rx, rx) / denom;
    for (std::size_t tx = 0; tx < n; ++tx) {
      if (tx != rx) grad[tx] -= c * sinr * power_gains(tx, rx) / denom;
    }
  }
  return grad;
}

namespace {

struct AscentResult {
  std::vector<double> powers;
  double value;
};

AscentResult projected_ascent(std::vector<double> p, const Eigen::MatrixXd& g, const RadioParams& params,
                              const MprConfig& cfg) {
  const double lo = cfg.epsilon_fraction * params.p_max_w;
  const double hi = params.p_max_w;
  auto project = [&](std::vector<double>& v) {
    for (double& x : v) x = std::clamp(x, lo, hi);
  };
  project(p);
  double value = log_rate_product(p, g, params);
  // Step measured in watts; starts at the box width and adapts.
  double step = hi;
  std::vector<double> trial(p.size());
  for (int it = 0; it < cfg.iterations; ++it) {
    const auto grad = log_rate_product_gradient(p, g, params);
    const double gnorm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
    if (!(gnorm > 0.0)) break;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < p.size(); ++i) trial[i] = p[i] + step * grad[i] / gnorm;
      project(trial);
      double dir = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) dir += grad[i] * (trial[i] - p[i]);
      const double tv = log_rate_product(trial, g, params);
      if (std::isfinite(tv) && tv >= value + 1e-4 * dir && trial != p) {
        p.swap(trial);
        value = tv;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    step = std::min(2.0 * step, hi);
  }
  return {std::move(p), value};
}

}  // namespace

PolicyDecision max_prod_rate(const Eigen::MatrixXd& power_gains, const RadioParams& params, const MprConfig& cfg,
                             std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(power_gains.rows());
  if (cfg.starts < 1 || cfg.iterations < 0) throw std::invalid_argument("MPR: invalid optimizer settings");
  const double lo = cfg.epsilon_fraction * params.p_max_w;
  std::uniform_real_distribution<double> unit(lo, params.p_max_w);

  AscentResult best{{}, -std::numeric_limits<double>::infinity()};
  for (int s = 0; s < cfg.starts; ++s) {
    std::vector<double> start(n, params.p_max_w);
    if (s > 0) {
      for (double& x : start) x = unit(rng);
    }
    auto r = projected_ascent(std::move(start), power_gains, params, cfg);
    if (r.value > best.value) best = std::move(r);
  }
  return PolicyDecision{std::move(best.powers), std::vector<bool>(n, true), 1.0, false};
}

PolicyDecision round_robin(std::size_t n, std::size_t slots, double p_max, std::mt19937_64& rng) {
  if (slots < 1 || slots > n) throw std::invalid_argument("round robin needs 1 <= I <= N");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first `slots` entries form a uniform sample.
  for (std::size_t i = 0; i < slots; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  PolicyDecision d{std::vector<double>(n, 0.0), std::vector<bool>(n, false), 1.0 / static_cast<double>(slots), true};
  for (std::size_t i = 0; i < slots; ++i) {
    d.powers[idx[i]] = p_max;
    d.active[idx[i]] = true;
  }
  return d;
}

PolicyDecision no_interference(std::size_t n, double p_max) {
  return PolicyDecision{std::vector<double>(n, p_max), std::vector<bool>(n, true), 1.0, true};
}

std::string PolicySpec::label() const {
  switch (kind) {
    case PolicyKind::kCica: return "cica";
    case PolicyKind::kFixed: return "fixed";
    case PolicyKind::kMaxProdRate: return "mpr";
    case PolicyKind::kRoundRobin: return "rr" + std::to_string(rr_slots);
    case PolicyKind::kNoInterference: return "nointerf";
  }
  return "unknown";
}

PolicySpec PolicySpec::parse(const std::string& label) {
  PolicySpec spec;
  if (label == "cica") {
    spec.kind = PolicyKind::kCica;
  } else if (label == "fixed") {
    spec.kind = PolicyKind::kFixed;
  } else if (label == "mpr") {
    spec.kind = PolicyKind::kMaxProdRate;
  } else if (label == "nointerf") {
    spec.kind = PolicyKind::kNoInterference;
  } else if (label.size() > 2 && label.rfind("rr", 0) == 0 &&
             std::all_of(label.begin() + 2, label.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    spec.kind = PolicyKind::kRoundRobin;
    spec.rr_slots = std::stoul(label.substr(2));
    if (spec.rr_slots == 0) throw std::invalid_argument("round robin needs I >= 1");
  } else {
    throw std::invalid_argument("unknown policy '" + label + "' (expected cica, fixed, mpr, rr<I>, nointerf)");
  }
  return spec;
}

PolicyRunner::PolicyRunner(PolicySpec spec, const RadioParams& radio) : spec_(std::move(spec)), radio_(radio) {
  radio_.validate();
  if (spec_.kind == PolicyKind::kCica) spec_.cica.validate();
  if (spec_.kind == PolicyKind::kFixed && (!(spec_.fixed_power_w >= 0.0) || spec_.fixed_power_w > radio_.p_max_w)) {
    throw std::invalid_argument("fixed power must lie in [0, p_max]");
  }
}

void PolicyRunner::begin_episode(const ChannelRealization& channel, std::mt19937_64& rng) {
  const std::size_t n = channel.size();
  power_gains_ = channel.power_gains();
  switch (spec_.kind) {
    case PolicyKind::kFixed: decision_ = fixed_power(n, spec_.fixed_power_w, radio_.p_max_w); break;
    case PolicyKind::kNoInterference: decision_ = no_interference(n, radio_.p_max_w); break;
    case PolicyKind::kMaxProdRate:
      if (!spec_.mpr_per_tti) decision_ = max_prod_rate(power_gains_, radio_, spec_.mpr, rng);
      break;
    case PolicyKind::kRoundRobin:
      if (spec_.rr_slots > n) throw std::invalid_argument("round robin needs I <= N");
      break;
    case PolicyKind::kCica: break;
  }
}

const PolicyDecision& PolicyRunner::decide(std::int64_t /*now*/, std::span<const double> etas, std::mt19937_64& rng) {
  switch (spec_.kind) {
    case PolicyKind::kCica: decision_ = cica(etas, spec_.cica); break;
    case PolicyKind::kRoundRobin: decision_ = round_robin(etas.size(), spec_.rr_slots, radio_.p_max_w, rng); break;
    case PolicyKind::kMaxProdRate:
      if (spec_.mpr_per_tti) decision_ = max_prod_rate(power_gains_, radio_, spec_.mpr, rng);
      break;
    case PolicyKind::kFixed:
    case PolicyKind::kNoInterference: break;
  }
  return decision_;
}

}  // namespace cica
