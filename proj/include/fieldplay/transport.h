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

#ifndef FIELDPLAY_TRANSPORT_H_
#define FIELDPLAY_TRANSPORT_H_

#include <span>
#include <vector>

namespace fieldplay {

struct TransportEntry {
  int source;
  int sink;
  double amount;
};

struct TransportResult {
  double cost = 0.0;
  std::vector<TransportEntry> plan;  // entries with positive flow
  std::vector<double> source_potential;
  std::vector<double> sink_potential;
  int pivots = 0;
};

struct TransportOptions {
  // 0 picks a generous cap from the problem size.
  int max_pivots = 0;
};

// Exact dense balanced transportation problem:
//   min sum_{ij} cost[i*n+j] * x_{ij}
//   s.t. sum_j x_{ij} = supply[i], sum_i x_{ij} = demand[j], x >= 0.
//
// Primal transportation simplex on the full bipartite graph. Entering arcs
// use the most-negative reduced cost with lexicographic ties; a long run of
// degenerate pivots switches to Bland's rule, which cannot cycle. Supplies
// and demands must be positive and balanced to within 1e-9 of total mass.
TransportResult SolveTransport(std::span<const double> supply,
                               std::span<const double> demand,
                               std::span<const double> cost,
                               const TransportOptions& options = {});

}  // namespace fieldplay

#endif  // FIELDPLAY_TRANSPORT_H_
