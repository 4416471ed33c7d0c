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

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace cica {

/// Bi-objective value, both minimized.
struct Objectives {
  double f1 = 0.0;
  double f2 = 0.0;

  bool operator==(const Objectives&) const = default;
};

enum class Dominance {
  kDominates,        // a <= b everywhere and a < b somewhere
  kWeaklyDominates,  // a == b
  kIncomparable,
  kDominated,        // b dominates a
};

/// Classifies `a` against `b`. Throws std::invalid_argument on NaN.
Dominance dominance(const Objectives& a, const Objectives& b);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  bool contains_open(double x) const { return x > lo && x < hi; }
};

/// CICA parameter ranges: k in (0, 1), eta0 in (0, 200).
struct SearchSpace {
  Interval k{0.0, 1.0};
  Interval eta0{0.0, 200.0};

  void validate() const;
};

struct Observation {
  double k = 0.0;
  double eta0 = 0.0;
  Objectives f;
  std::size_t trial = 0;
};

/// Nondominated sorting: fronts[0] holds the indices no point dominates,
/// fronts[1] the next layer, and so on. Indices keep insertion order.
std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const Objectives> points);

/// Area dominated by `points` and bounded by `reference`.
double hypervolume_2d(std::span<const Objectives> points, const Objectives& reference);

/// Reference point for hypervolume: 1.1 x the componentwise max of the
/// finite objective values (1 for a coordinate whose max is not positive).
Objectives hypervolume_reference(std::span<const Objectives> points);

struct ObservationSplit {
  std::vector<std::size_t> lower;  // O_l: the "good" observations
  std::vector<std::size_t> upper;  // O_g: the rest
};

/// Number of good observations: ceil(quantile * n), clamped to [1, n - 1].
std::size_t good_count(std::size_t n, double quantile);

/// Fills O_l front by front; the front that straddles the quota is thinned
/// by greedy hypervolume subset selection (ties go to insertion order).
/// Requires at least two observations.
ObservationSplit split_observations(std::span<const Objectives> points, double quantile);

/// Univariate Parzen estimator: one truncated Gaussian per observation plus
/// a uniform prior component, all equally weighted.
class ParzenEstimator {
 public:
  ParzenEstimator(std::span<const double> values, Interval domain);

  double pdf(double x) const;
  double log_pdf(double x) const { return std::log(pdf(x)); }
  double sample(std::mt19937_64& rng) const;

  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& bandwidths() const { return bandwidths_; }
  const Interval& domain() const { return domain_; }
  double component_weight() const { return 1.0 / static_cast<double>(centers_.size() + 1); }

 private:
  Interval domain_;
  std::vector<double> centers_;
  std::vector<double> bandwidths_;
  std::vector<double> mass_;  // truncated normal mass of each component inside the domain
};

ParzenEstimator fit_parzen(std::span<const double> values, Interval domain);

/// Draws `candidates` points from l and returns the one maximizing l/g.
double propose_parameter(std::span<const double> good, std::span<const double> bad, Interval domain,
                         std::size_t candidates, std::mt19937_64& rng);

struct Proposal {
  double k = 0.0;
  double eta0 = 0.0;
};

/// One TPE step over both parameters independently.
Proposal propose(std::span<const Observation> observations, const SearchSpace& space, std::size_t candidates,
                 double quantile, std::mt19937_64& rng);

struct MotpeConfig {
  std::size_t trials = 200;   // T, model-guided iterations
  std::size_t startup = 10;   // S, uniform random trials run first
  std::size_t candidates = 24;  // C
  double quantile = 0.5;
  SearchSpace space;

  void validate() const;
};

using Evaluator = std::function<Objectives(double k, double eta0)>;

struct MotpeResult {
  std::vector<Observation> front;
  std::vector<Observation> history;
};

/// Nondominated members of `history`; exact duplicates keep the first.
std::vector<Observation> pareto_front(std::span<const Observation> history);

/// S random trials, then T propose/evaluate iterations. An evaluation that
/// throws or returns non-finite values is recorded as (+inf, +inf).
MotpeResult optimize(const Evaluator& evaluate, const MotpeConfig& cfg, std::mt19937_64& rng);

struct TailSelection {
  std::size_t index = 0;
  double tail_cost = 0.0;
  std::vector<double> tail_costs;
};

/// Picks the front member with the smallest tail cost; ties go to the
/// smaller f1. Throws on an empty front.
TailSelection select_by_tail_cost(std::span<const Observation> front,
                                  const std::function<double(double k, double eta0)>& evaluate_tail);

}  // namespace cica
