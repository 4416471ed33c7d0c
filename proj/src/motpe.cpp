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

#include "cica/motpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cica {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double clamp_open(double x, const Interval& d) {
  if (x <= d.lo) return std::nextafter(d.lo, d.hi);
  if (x >= d.hi) return std::nextafter(d.hi, d.lo);
  return x;
}

bool finite(const Objectives& f) { return std::isfinite(f.f1) && std::isfinite(f.f2); }

}  // namespace

Dominance dominance(const Objectives& a, const Objectives& b) {
  if (std::isnan(a.f1) || std::isnan(a.f2) || std::isnan(b.f1) || std::isnan(b.f2)) {
    throw std::invalid_argument("dominance: NaN objective");
  }
  const bool a_le = a.f1 <= b.f1 && a.f2 <= b.f2;
  const bool b_le = b.f1 <= a.f1 && b.f2 <= a.f2;
  if (a_le && b_le) return Dominance::kWeaklyDominates;
  if (a_le) return Dominance::kDominates;
  if (b_le) return Dominance::kDominated;
  return Dominance::kIncomparable;
}

void SearchSpace::validate() const {
  for (const auto* iv : {&k, &eta0}) {
    if (!std::isfinite(iv->lo) || !std::isfinite(iv->hi) || !(iv->hi > iv->lo)) {
      throw std::invalid_argument("search space intervals must be finite with positive length");
    }
  }
}

std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const Objectives> points) {
  const std::size_t n = points.size();
  std::vector<std::size_t> dominated_by(n, 0);
  std::vector<std::vector<std::size_t>> dominates_list(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto rel = dominance(points[i], points[j]);
      if (rel == Dominance::kDominates) {
        dominates_list[i].push_back(j);
        ++dominated_by[j];
      } else if (rel == Dominance::kDominated) {
        dominates_list[j].push_back(i);
        ++dominated_by[i];
      }
    }
  }
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (dominated_by[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominates_list[i]) {
        if (--dominated_by[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

double hypervolume_2d(std::span<const Objectives> points, const Objectives& reference) {
  std::vector<Objectives> inside;
  for (const auto& p : points) {
    if (p.f1 < reference.f1 && p.f2 < reference.f2) inside.push_back(p);
  }
  std::sort(inside.begin(), inside.end(),
            [](const Objectives& a, const Objectives& b) { return a.f1 < b.f1 || (a.f1 == b.f1 && a.f2 < b.f2); });
  double volume = 0.0;
  double ceiling = reference.f2;
  for (const auto& p : inside) {
    if (p.f2 < ceiling) {
      volume += (reference.f1 - p.f1) * (ceiling - p.f2);
      ceiling = p.f2;
    }
  }
  return volume;
}

Objectives hypervolume_reference(std::span<const Objectives> points) {
  double m1 = -kInf;
  double m2 = -kInf;
  for (const auto& p : points) {
    if (std::isfinite(p.f1)) m1 = std::max(m1, p.f1);
    if (std::isfinite(p.f2)) m2 = std::max(m2, p.f2);
  }
  return {m1 > 0.0 ? 1.1 * m1 : 1.0, m2 > 0.0 ? 1.1 * m2 : 1.0};
}

std::size_t good_count(std::size_t n, double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0)) throw std::invalid_argument("quantile must lie in (0, 1)");
  if (n < 2) throw std::invalid_argument("need at least two observations to split");
  const auto wanted = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n)));
  return std::clamp<std::size_t>(wanted, 1, n - 1);
}

ObservationSplit split_observations(std::span<const Objectives> points, double quantile) {
  const std::size_t n_good = good_count(points.size(), quantile);
  const auto fronts = nondominated_sort(points);
  const Objectives ref = hypervolume_reference(points);

  std::vector<bool> good(points.size(), false);
  std::size_t taken = 0;
  for (const auto& front : fronts) {
    if (taken + front.size() <= n_good) {
      for (std::size_t i : front) good[i] = true;
      taken += front.size();
      if (taken == n_good) break;
      continue;
    }
    // Greedy hypervolume subset selection inside the straddling front.
    std::vector<Objectives> chosen;
    std::vector<bool> used(front.size(), false);
    while (taken < n_good) {
      const double base = hypervolume_2d(chosen, ref);
      std::size_t best = front.size();
      double best_gain = -1.0;
      for (std::size_t c = 0; c < front.size(); ++c) {
        if (used[c]) continue;
        chosen.push_back(points[front[c]]);
        const double gain = hypervolume_2d(chosen, ref) - base;
        chosen.pop_back();
        if (gain > best_gain) {
          best_gain = gain;
          best = c;
        }
      }
      used[best] = true;
      chosen.push_back(points[front[best]]);
      good[front[best]] = true;
      ++taken;
    }
    break;
  }

  ObservationSplit split;
  for (std::size_t i = 0; i < points.size(); ++i) (good[i] ? split.lower : split.upper).push_back(i);
  return split;
}

ParzenEstimator::ParzenEstimator(std::span<const double> values, Interval domain) : domain_(domain) {
  if (!(domain.hi > domain.lo)) throw std::invalid_argument("Parzen domain must have positive width");
  const double width = domain.width();
  centers_.reserve(values.size());
  for (double v : values) centers_.push_back(std::clamp(v, domain.lo, domain.hi));
  std::sort(centers_.begin(), centers_.end());

  const std::size_t n = centers_.size();
  if (n == 0) return;
  const double min_bw = width / static_cast<double>(std::min<std::size_t>(100, n));
  bandwidths_.resize(n);
  mass_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? domain.lo : centers_[i - 1];
    const double right = i + 1 == n ? domain.hi : centers_[i + 1];
    const double spacing = std::max(centers_[i] - left, right - centers_[i]);
    bandwidths_[i] = std::clamp(spacing, min_bw, width);
    mass_[i] = normal_cdf((domain.hi - centers_[i]) / bandwidths_[i]) -
               normal_cdf((domain.lo - centers_[i]) / bandwidths_[i]);
  }
}

double ParzenEstimator::pdf(double x) const {
  if (x < domain_.lo || x > domain_.hi) return 0.0;
  const double w = component_weight();
  double density = w / domain_.width();
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const double z = (x - centers_[i]) / bandwidths_[i];
    density += w * normal_pdf(z) / (bandwidths_[i] * mass_[i]);
  }
  return density;
}

double ParzenEstimator::sample(std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, centers_.size());
  const std::size_t c = pick(rng);
  if (c == centers_.size()) {
    std::uniform_real_distribution<double> uniform(domain_.lo, domain_.hi);
    return clamp_open(uniform(rng), domain_);
  }
  // Rejection sampling is cheap here: every center lies in the domain and
  // bandwidths never exceed its width, so acceptance is at least ~34%.
  std::normal_distribution<double> normal(centers_[c], bandwidths_[c]);
  for (;;) {
    const double x = normal(rng);
    if (x > domain_.lo && x < domain_.hi) return x;
  }
}

ParzenEstimator fit_parzen(std::span<const double> values, Interval domain) {
  return ParzenEstimator(values, domain);
}

double propose_parameter(std::span<const double> good, std::span<const double> bad, Interval domain,
                         std::size_t candidates, std::mt19937_64& rng) {
  if (candidates == 0) throw std::invalid_argument("need at least one candidate");
  const ParzenEstimator l(good, domain);
  const ParzenEstimator g(bad, domain);
  double best = 0.0;
  double best_score = -kInf;
  for (std::size_t c = 0; c < candidates; ++c) {
    const double x = l.sample(rng);
    const double score = l.log_pdf(x) - g.log_pdf(x);
    if (score > best_score) {
      best_score = score;
      best = x;
    }
  }
  return best;
}

Proposal propose(std::span<const Observation> observations, const SearchSpace& space, std::size_t candidates,
                 double quantile, std::mt19937_64& rng) {
  std::vector<Objectives> fs;
  fs.reserve(observations.size());
  for (const auto& o : observations) fs.push_back(o.f);
  const auto split = split_observations(fs, quantile);

  auto gather = [&](const std::vector<std::size_t>& idx, double Observation::*field) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(observations[i].*field);
    return out;
  };
  Proposal p;
  p.k = propose_parameter(gather(split.lower, &Observation::k), gather(split.upper, &Observation::k), space.k,
                          candidates, rng);
  p.eta0 = propose_parameter(gather(split.lower, &Observation::eta0), gather(split.upper, &Observation::eta0),
                             space.eta0, candidates, rng);
  return p;
}

void MotpeConfig::validate() const {
  space.validate();
  if (startup < 1) throw std::invalid_argument("MOTPE needs at least one startup trial");
  if (candidates < 1) throw std::invalid_argument("MOTPE needs at least one candidate");
  if (!(quantile > 0.0 && quantile < 1.0)) throw std::invalid_argument("MOTPE quantile must lie in (0, 1)");
}

std::vector<Observation> pareto_front(std::span<const Observation> history) {
  std::vector<Observation> front;
  for (std::size_t i = 0; i < history.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < history.size() && keep; ++j) {
      if (i == j) continue;
      const auto rel = dominance(history[j].f, history[i].f);
      if (rel == Dominance::kDominates || (rel == Dominance::kWeaklyDominates && j < i)) keep = false;
    }
    if (keep) front.push_back(history[i]);
  }
  return front;
}

MotpeResult optimize(const Evaluator& evaluate, const MotpeConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  MotpeResult result;
  auto record = [&](double k, double eta0) {
    Objectives f{kInf, kInf};
    try {
      f = evaluate(k, eta0);
      if (!finite(f)) f = {kInf, kInf};
    } catch (const std::exception&) {
      f = {kInf, kInf};
    }
    result.history.push_back(Observation{k, eta0, f, result.history.size()});
  };

  std::uniform_real_distribution<double> uk(cfg.space.k.lo, cfg.space.k.hi);
  std::uniform_real_distribution<double> ue(cfg.space.eta0.lo, cfg.space.eta0.hi);
  for (std::size_t s = 0; s < cfg.startup; ++s) {
    const double k = clamp_open(uk(rng), cfg.space.k);
    const double eta0 = clamp_open(ue(rng), cfg.space.eta0);
    record(k, eta0);
  }
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Proposal p;
    if (result.history.size() < 2) {
      p = {clamp_open(uk(rng), cfg.space.k), clamp_open(ue(rng), cfg.space.eta0)};
    } else {
      p = propose(result.history, cfg.space, cfg.candidates, cfg.quantile, rng);
    }
    record(p.k, p.eta0);
  }
  result.front = pareto_front(result.history);
  return result;
}

TailSelection select_by_tail_cost(std::span<const Observation> front,
                                  const std::function<double(double k, double eta0)>& evaluate_tail) {
  if (front.empty()) throw std::invalid_argument("select_by_tail_cost: empty front");
  TailSelection sel;
  sel.tail_costs.reserve(front.size());
  for (const auto& o : front) sel.tail_costs.push_back(evaluate_tail(o.k, o.eta0));
  sel.index = 0;
  for (std::size_t i = 1; i < front.size(); ++i) {
    const double a = sel.tail_costs[i];
    const double b = sel.tail_costs[sel.index];
    if (a < b || (a == b && front[i].f.f1 < front[sel.index].f.f1)) sel.index = i;
  }
  sel.tail_cost = sel.tail_costs[sel.index];
  return sel;
}

}  // namespace cica
