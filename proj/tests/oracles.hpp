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

// Slow reference implementations shared by the unit and acceptance tests.

#include <algorithm>
#include <set>
#include <vector>

#include "cica/motpe.hpp"

namespace cica::oracle {

inline bool dominates(const Objectives& a, const Objectives& b) {
  return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

/// Front rank of every point by repeated peeling.
inline std::vector<int> ranks(const std::vector<Objectives>& pts) {
  std::vector<int> rank(pts.size(), -1);
  int level = 0;
  std::size_t left = pts.size();
  while (left > 0) {
    std::vector<std::size_t> layer;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (rank[i] >= 0) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
        if (j != i && rank[j] < 0 && dominates(pts[j], pts[i])) dominated = true;
      }
      if (!dominated) layer.push_back(i);
    }
    for (std::size_t i : layer) rank[i] = level;
    left -= layer.size();
    ++level;
  }
  return rank;
}

/// Exact dominated area by coordinate compression over the union of boxes.
inline double hypervolume(const std::vector<Objectives>& pts, const Objectives& ref) {
  std::vector<double> xs{ref.f1}, ys{ref.f2};
  for (const auto& p : pts) {
    if (p.f1 < ref.f1 && p.f2 < ref.f2) {
      xs.push_back(p.f1);
      ys.push_back(p.f2);
    }
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double cx = xs[i], cy = ys[j];
      bool covered = false;
      for (const auto& p : pts) {
        if (p.f1 <= cx && p.f2 <= cy) {
          covered = true;
          break;
        }
      }
      if (covered) area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
    }
  }
  return area;
}

/// Good set: whole fronts while they fit, then greedy hypervolume
/// contribution inside the straddling front (first index wins ties).
inline std::set<std::size_t> good_set(const std::vector<Objectives>& pts, std::size_t n_good,
                                      const Objectives& ref) {
  const auto rank = ranks(pts);
  std::set<std::size_t> good;
  for (int level = 0; good.size() < n_good; ++level) {
    std::vector<std::size_t> layer;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (rank[i] == level) layer.push_back(i);
    }
    if (good.size() + layer.size() <= n_good) {
      good.insert(layer.begin(), layer.end());
      continue;
    }
    std::vector<Objectives> chosen;
    std::set<std::size_t> used;
    while (good.size() < n_good) {
      const double base = hypervolume(chosen, ref);
      double best_gain = -1.0;
      std::size_t best = 0;
      for (std::size_t i : layer) {
        if (used.count(i)) continue;
        auto trial = chosen;
        trial.push_back(pts[i]);
        const double gain = hypervolume(trial, ref) - base;
        if (gain > best_gain + 1e-12 * std::max(1.0, base)) {
          best_gain = gain;
          best = i;
        }
      }
      used.insert(best);
      chosen.push_back(pts[best]);
      good.insert(best);
    }
  }
  return good;
}

// Two quadratic bowls centred at k = 0.3 and k = 0.7; the Pareto set is the
// segment between them at eta0 = 100.
inline Objectives toy(double k, double eta0) {
  const double e = (eta0 - 100.0) / 200.0;
  return {(k - 0.3) * (k - 0.3) + e * e, (k - 0.7) * (k - 0.7) + e * e};
}

}  // namespace cica::oracle
