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

#include "fieldplay/transport.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fieldplay/common.h"

namespace fieldplay {
namespace {

struct Cell {
  int row;
  int col;
  double flow;
};

// Basis tree bookkeeping for the transportation simplex. Nodes are rows
// [0, m) and columns [m, m+n). The basis always holds m+n-1 cells forming a
// spanning tree.
class Basis {
 public:
  Basis(int m, int n) : m_(m), n_(n), adj_(m + n), is_basic_(m * n, 0) {}

  void Add(const Cell& c) {
    cells_.push_back(c);
    int id = static_cast<int>(cells_.size()) - 1;
    adj_[c.row].push_back(id);
    adj_[m_ + c.col].push_back(id);
    is_basic_[c.row * n_ + c.col] = 1;
  }

  void Replace(int cell_id, const Cell& next) {
    const Cell& old = cells_[cell_id];
    Detach(old.row, cell_id);
    Detach(m_ + old.col, cell_id);
    is_basic_[old.row * n_ + old.col] = 0;
    cells_[cell_id] = next;
    adj_[next.row].push_back(cell_id);
    adj_[m_ + next.col].push_back(cell_id);
    is_basic_[next.row * n_ + next.col] = 1;
  }

  bool IsBasic(int i, int j) const { return is_basic_[i * n_ + j] != 0; }
  std::vector<Cell>& cells() { return cells_; }
  const std::vector<int>& AdjacentCells(int node) const { return adj_[node]; }
  int NumNodes() const { return m_ + n_; }

 private:
  void Detach(int node, int cell_id) {
    auto& list = adj_[node];
    list.erase(std::find(list.begin(), list.end(), cell_id));
  }

  int m_, n_;
  std::vector<Cell> cells_;
  std::vector<std::vector<int>> adj_;
  std::vector<char> is_basic_;
};

}  // namespace

TransportResult SolveTransport(std::span<const double> supply,
                               std::span<const double> demand,
                               std::span<const double> cost,
                               const TransportOptions& options) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  FIELDPLAY_CHECK_ARG(m >= 1 && n >= 1, "transport: empty marginal");
  FIELDPLAY_CHECK_ARG(cost.size() == static_cast<std::size_t>(m) * n,
                      "transport: cost matrix size mismatch");

  double mass_a = 0.0, mass_b = 0.0;
  for (double s : supply) {
    FIELDPLAY_CHECK_ARG(IsFinite(s) && s > 0.0, "transport: supply must be positive");
    mass_a += s;
  }
  for (double d : demand) {
    FIELDPLAY_CHECK_ARG(IsFinite(d) && d > 0.0, "transport: demand must be positive");
    mass_b += d;
  }
  FIELDPLAY_CHECK_ARG(std::abs(mass_a - mass_b) <= 1e-9 * std::max(1.0, mass_a),
                      "transport: unbalanced marginals (", mass_a, " vs ",
                      mass_b, ")");

  double max_abs_cost = 0.0;
  for (double c : cost) {
    FIELDPLAY_CHECK_ARG(IsFinite(c), "transport: non-finite cost entry");
    max_abs_cost = std::max(max_abs_cost, std::abs(c));
  }
  const double eps = 1e-12 * (1.0 + max_abs_cost);

  // Absorb the rounding imbalance into the largest demand.
  std::vector<double> a(supply.begin(), supply.end());
  std::vector<double> b(demand.begin(), demand.end());
  int jmax = static_cast<int>(std::max_element(b.begin(), b.end()) - b.begin());
  b[jmax] += mass_a - mass_b;

  // Northwest-corner initial basis: exactly m+n-1 cells on a staircase path,
  // possibly with zero allocations.
  Basis basis(m, n);
  {
    int i = 0, j = 0;
    std::vector<double> ar = a, br = b;
    while (true) {
      double x = std::min(ar[i], br[j]);
      basis.Add({i, j, x});
      ar[i] -= x;
      br[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      if (ar[i] <= 0.0 && i < m - 1) {
        ++i;
      } else {
        ++j;
      }
    }
    FIELDPLAY_CHECK(static_cast<int>(basis.cells().size()) == m + n - 1,
                    "northwest corner produced a non-tree basis");
  }

  std::vector<double> u(m, 0.0), v(n, 0.0);
  std::vector<int> parent_cell(m + n);
  std::vector<int> parent_node(m + n);
  std::vector<int> stack;

  auto node_row = [m](int node) { return node < m; };

  // Potentials from the basis tree, rooted at row 0 with u[0] = 0.
  auto compute_potentials = [&]() {
    std::vector<char> seen(m + n, 0);
    stack.assign(1, 0);
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack.empty()) {
      int node = stack.back();
      stack.pop_back();
      for (int cid : basis.AdjacentCells(node)) {
        const Cell& c = basis.cells()[cid];
        int other = node_row(node) ? m + c.col : c.row;
        if (seen[other]) continue;
        seen[other] = 1;
        if (node_row(node)) {
          v[c.col] = cost[c.row * n + c.col] - u[c.row];
        } else {
          u[c.row] = cost[c.row * n + c.col] - v[c.col];
        }
        stack.push_back(other);
      }
    }
    for (int k = 0; k < m + n; ++k) {
      FIELDPLAY_CHECK(seen[k], "basis tree is not spanning");
    }
  };

  const long long cells_ll = static_cast<long long>(m) * n;
  int max_pivots = options.max_pivots > 0
                       ? options.max_pivots
                       : static_cast<int>(std::min<long long>(
                             2'000'000, 200LL * (m + n) + 4 * cells_ll));

  TransportResult result;
  bool bland = false;
  int degenerate_streak = 0;

  for (int pivot = 0;; ++pivot) {
    if (pivot > max_pivots) {
      throw std::runtime_error(internal::StrCat(
          "fieldplay: transport simplex exceeded ", max_pivots, " pivots"));
    }
    compute_potentials();

    // Entering arc.
    int ei = -1, ej = -1;
    double best = -eps;
    bool found = false;
    for (int i = 0; i < m && !(bland && found); ++i) {
      const double ui = u[i];
      for (int j = 0; j < n; ++j) {
        if (basis.IsBasic(i, j)) continue;
        double r = cost[i * n + j] - ui - v[j];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
          found = true;
          if (bland) break;
        }
      }
    }
    if (!found) {
      result.pivots = pivot;
      break;
    }

    // Unique tree path from row ei to column node m+ej.
    {
      std::vector<char> seen(m + n, 0);
      stack.assign(1, ei);
      seen[ei] = 1;
      parent_node[ei] = -1;
      bool reached = false;
      while (!stack.empty() && !reached) {
        int node = stack.back();
        stack.pop_back();
        for (int cid : basis.AdjacentCells(node)) {
          const Cell& c = basis.cells()[cid];
          int other = node_row(node) ? m + c.col : c.row;
          if (seen[other]) continue;
          seen[other] = 1;
          parent_node[other] = node;
          parent_cell[other] = cid;
          if (other == m + ej) {
            reached = true;
            break;
          }
          stack.push_back(other);
        }
      }
      FIELDPLAY_CHECK(reached, "entering arc endpoints not tree-connected");
    }

    // Walk back from the column node; cells alternate -,+,-,... starting at
    // the cell adjacent to the entering (+) arc.
    std::vector<int> minus_cells, plus_cells;
    {
      int node = m + ej;
      int sign = -1;
      while (parent_node[node] != -1) {
        (sign < 0 ? minus_cells : plus_cells).push_back(parent_cell[node]);
        node = parent_node[node];
        sign = -sign;
      }
    }

    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (int cid : minus_cells) {
      const Cell& c = basis.cells()[cid];
      bool better = c.flow < theta - 0.0;
      bool tie = c.flow == theta;
      if (better ||
          (tie && leaving >= 0 &&
           c.row * n + c.col < basis.cells()[leaving].row * n +
                                   basis.cells()[leaving].col)) {
        theta = c.flow;
        leaving = cid;
      }
    }
    FIELDPLAY_CHECK(leaving >= 0, "no leaving arc on pivot cycle");

    for (int cid : plus_cells) basis.cells()[cid].flow += theta;
    for (int cid : minus_cells) {
      double f = basis.cells()[cid].flow - theta;
      basis.cells()[cid].flow = f > 0.0 ? f : 0.0;
    }
    basis.Replace(leaving, {ei, ej, theta});

    if (theta <= 0.0) {
      if (++degenerate_streak >= 64) bland = true;
    } else {
      degenerate_streak = 0;
    }
  }

  // Optimality sanity: all basic flows feasible, objective assembled from the
  // basis only (nonbasic flows are zero).
  for (const Cell& c : basis.cells()) {
    FIELDPLAY_CHECK(c.flow >= 0.0, "negative basic flow");
    result.cost += c.flow * cost[c.row * n + c.col];
    if (c.flow > 0.0) result.plan.push_back({c.row, c.col, c.flow});
  }
  result.source_potential.assign(u.begin(), u.end());
  result.sink_potential.assign(v.begin(), v.end());
  return result;
}

}  // namespace fieldplay
