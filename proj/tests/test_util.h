// Copyright 2026 The Fieldplay Authors.
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

#ifndef FIELDPLAY_TESTS_TEST_UTIL_H_
#define FIELDPLAY_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "fieldplay/common.h"
#include "fieldplay/rng.h"

namespace fieldplay::testing {

// Exact 1-D Wasserstein-1 between weighted point sets via the CDF formula
// W1 = integral |F_mu - F_nu|. Independent of the simplex solver.
inline double Wasserstein1OnLine(std::vector<std::pair<double, double>> mu,
                                 std::vector<std::pair<double, double>> nu) {
  struct Event {
    double x;
    double dmu;
    double dnu;
  };
  std::vector<Event> events;
  for (auto& [x, w] : mu) events.push_back({x, w, 0.0});
  for (auto& [x, w] : nu) events.push_back({x, 0.0, w});
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.x < b.x; });
  double total = 0.0, fmu = 0.0, fnu = 0.0;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    fmu += events[i].dmu;
    fnu += events[i].dnu;
    total += std::abs(fmu - fnu) * (events[i + 1].x - events[i].x);
  }
  return total;
}

// Brute-force optimum of a tiny transportation LP by enumerating basic
// feasible solutions (spanning trees of the bipartite graph). Exponential;
// keep m*n small.
inline double BruteForceTransport(const std::vector<double>& a,
                                  const std::vector<double>& b,
                                  const std::vector<double>& cost) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  const int cells = m * n;
  const int basis_size = m + n - 1;
  std::vector<int> chosen;
  double best = std::numeric_limits<double>::infinity();

  // Solve the flows on a candidate basis by peeling degree-one nodes.
  auto try_basis = [&]() {
    std::vector<double> flow(chosen.size(), 0.0);
    std::vector<double> supply = a, demand = b;
    std::vector<char> used(chosen.size(), 0);
    int remaining = static_cast<int>(chosen.size());
    while (remaining > 0) {
      bool progress = false;
      for (std::size_t e = 0; e < chosen.size(); ++e) {
        if (used[e]) continue;
        int i = chosen[e] / n, j = chosen[e] % n;
        int row_degree = 0, col_degree = 0;
        for (std::size_t e2 = 0; e2 < chosen.size(); ++e2) {
          if (used[e2]) continue;
          if (chosen[e2] / n == i) ++row_degree;
          if (chosen[e2] % n == j) ++col_degree;
        }
        if (row_degree == 1) {
          flow[e] = supply[i];
          demand[j] -= supply[i];
          supply[i] = 0.0;
        } else if (col_degree == 1) {
          flow[e] = demand[j];
          supply[i] -= demand[j];
          demand[j] = 0.0;
        } else {
          continue;
        }
        used[e] = 1;
        --remaining;
        progress = true;
      }
      if (!progress) return;  // not a tree
    }
    double value = 0.0;
    for (std::size_t e = 0; e < chosen.size(); ++e) {
      if (flow[e] < -1e-12) return;  // infeasible basis
      value += flow[e] * cost[chosen[e]];
    }
    best = std::min(best, value);
  };

  std::function<void(int)> recurse = [&](int start) {
    if (static_cast<int>(chosen.size()) == basis_size) {
      try_basis();
      return;
    }
    for (int c = start; c < cells; ++c) {
      chosen.push_back(c);
      recurse(c + 1);
      chosen.pop_back();
    }
  };
  recurse(0);
  return best;
}

}  // namespace fieldplay::testing

#endif  // FIELDPLAY_TESTS_TEST_UTIL_H_
