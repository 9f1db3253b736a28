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

#include "fieldplay/population.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fieldplay {

int BestResponseFinite(std::span<const double> costs) {
  FIELDPLAY_CHECK_ARG(!costs.empty(), "best response over an empty cost list");
  int best = 0;
  for (std::size_t j = 0; j < costs.size(); ++j) {
    FIELDPLAY_CHECK_ARG(IsFinite(costs[j]), "non-finite cost at action ", j);
    if (costs[j] < costs[best]) best = static_cast<int>(j);
  }
  return best;
}

Eigen::VectorXd ProjectToSimplex(const Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size());
  FIELDPLAY_CHECK_ARG(n >= 1, "simplex projection of an empty vector");
  std::vector<double> u(y.data(), y.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (int j = 0; j < n; ++j) {
    running += u[j];
    double candidate = (running - 1.0) / (j + 1);
    if (u[j] - candidate > 0.0) {
      rho = j + 1;
      tau = candidate;
    }
  }
  FIELDPLAY_CHECK(rho >= 1, "simplex projection found no support");
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j) out[j] = std::max(y[j] - tau, 0.0);
  return out;
}

PopulationCostTable PopulationCostTable::FromName(const std::string& name,
                                                  int n_actions,
                                                  std::vector<double> slope,
                                                  std::vector<double> offset) {
  PopulationCostTable table;
  if (name == "congestion-linear") {
    table.kind = Kind::kCongestionLinear;
  } else if (name == "congestion-affine") {
    table.kind = Kind::kCongestionAffine;
  } else if (name == "constant") {
    table.kind = Kind::kConstant;
  } else if (name == "anti-congestion") {
    table.kind = Kind::kAntiCongestion;
  } else {
    FIELDPLAY_CHECK_ARG(false, "unknown population cost builtin '", name, "'");
  }
  if (table.kind == Kind::kCongestionAffine) {
    if (slope.empty()) slope.assign(n_actions, 1.0);
    FIELDPLAY_CHECK_ARG(static_cast<int>(slope.size()) == n_actions,
                        "cost slope needs ", n_actions, " entries");
    for (double s : slope) {
      FIELDPLAY_CHECK_ARG(IsFinite(s) && s >= 0.0,
                          "affine congestion slopes must be >= 0");
    }
    table.slope = std::move(slope);
  }
  if (table.kind == Kind::kCongestionAffine || table.kind == Kind::kConstant) {
    if (offset.empty()) offset.assign(n_actions, 0.0);
    FIELDPLAY_CHECK_ARG(static_cast<int>(offset.size()) == n_actions,
                        "cost offset needs ", n_actions, " entries");
    for (double c : offset) FIELDPLAY_CHECK_ARG(IsFinite(c), "non-finite offset");
    table.offset = std::move(offset);
  }
  return table;
}

double PopulationCostTable::Cost(int action, const Eigen::VectorXd& m) const {
  switch (kind) {
    case Kind::kCongestionLinear:
      return m[action];
    case Kind::kCongestionAffine:
      return slope[action] * m[action] + offset[action];
    case Kind::kConstant:
      return offset[action];
    case Kind::kAntiCongestion:
      return -m[action];
  }
  return 0.0;
}

Eigen::VectorXd PopulationCostTable::Costs(const Eigen::VectorXd& m) const {
  Eigen::VectorXd out(m.size());
  for (int j = 0; j < m.size(); ++j) out[j] = Cost(j, m);
  return out;
}

bool PopulationCostTable::Monotone() const {
  // Diagonal cost tables with nonnegative slopes give
  // sum_j slope_j (m_j - m'_j)^2 >= 0.
  return kind != Kind::kAntiCongestion;
}

std::string PopulationCostTable::Name() const {
  switch (kind) {
    case Kind::kCongestionLinear:
      return "congestion-linear";
    case Kind::kCongestionAffine:
      return "congestion-affine";
    case Kind::kConstant:
      return "constant";
    case Kind::kAntiCongestion:
      return "anti-congestion";
  }
  return "?";
}

PopulationGame::PopulationGame(int n_actions, PopulationCostTable cost,
                               int players)
    : n_actions_(n_actions), cost_(std::move(cost)), players_(players) {
  FIELDPLAY_CHECK_ARG(n_actions >= 2, "population game needs >= 2 actions");
  FIELDPLAY_CHECK_ARG(players >= 1, "population game needs >= 1 player");
}

PopulationGame::BruteForceResult PopulationGame::BruteForceEquilibrium(
    int grid) const {
  FIELDPLAY_CHECK_ARG(n_actions_ <= 5,
                      "brute-force oracle supports at most 5 actions");
  FIELDPLAY_CHECK_ARG(grid >= 1 && grid <= 200,
                      "brute-force grid must be in [1, 200]");
  // Compositions of `grid` into n_actions parts.
  double combos = 1.0;
  for (int r = 1; r < n_actions_; ++r) combos *= double(grid + r) / r;
  FIELDPLAY_CHECK_ARG(combos <= 2e6, "brute-force grid infeasibly large");

  BruteForceResult best;
  best.gap = std::numeric_limits<double>::infinity();
  std::vector<int> counts(n_actions_, 0);
  Eigen::VectorXd m(n_actions_);

  auto evaluate = [&]() {
    for (int j = 0; j < n_actions_; ++j) {
      m[j] = static_cast<double>(counts[j]) / grid;
    }
    Eigen::VectorXd c = cost_.Costs(m);
    double cmin = c.minCoeff();
    double gap = 0.0;
    for (int j = 0; j < n_actions_; ++j) {
      if (counts[j] > 0) gap = std::max(gap, c[j] - cmin);
    }
    if (gap < best.gap) {  // ties keep the first point in enumeration order
      best.gap = gap;
      best.point = m;
    }
  };

  // Depth-first over counts, highest count first at each level for a
  // deterministic enumeration order.
  auto recurse = [&](auto&& self, int level, int remaining) -> void {
    if (level == n_actions_ - 1) {
      counts[level] = remaining;
      evaluate();
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      counts[level] = c;
      self(self, level + 1, remaining - c);
    }
  };
  recurse(recurse, 0, grid);
  return best;
}

namespace {

// Process-wide metric handles so that measures built by different game
// instances over the same action space stay comparable.
MetricPtrOf<int> DiscreteIntMetric() {
  static const MetricPtrOf<int> metric = MakeMetric<int>(
      [](const int& a, const int& b) { return a == b ? 0.0 : 1.0; });
  return metric;
}

MetricPtrOf<Eigen::VectorXd> HalfL1Metric() {
  static const MetricPtrOf<Eigen::VectorXd> metric =
      MakeMetric<Eigen::VectorXd>(
          [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return 0.5 * (a - b).lpNorm<1>();
          });
  return metric;
}

}  // namespace

PopulationFpGame::PopulationFpGame(std::shared_ptr<const PopulationGame> base)
    : base_(std::move(base)), metric_(DiscreteIntMetric()) {}

std::unique_ptr<GameInstance<int>::Prepared> PopulationFpGame::Prepare(
    const DiscreteMeasure<int>& eta) const {
  auto prep = std::make_unique<PreparedPop>();
  prep->source = &eta;
  prep->aggregate = Eigen::VectorXd::Zero(base_->n_actions());
  for (const auto& atom : eta.atoms()) {
    FIELDPLAY_CHECK_ARG(atom.point >= 0 && atom.point < base_->n_actions(),
                        "measure atom outside the action set");
    prep->aggregate[atom.point] += atom.weight;
  }
  prep->costs = base_->cost_table().Costs(prep->aggregate);
  return prep;
}

std::unique_ptr<GameInstance<int>::Prepared> PopulationFpGame::PrepareMix(
    const Prepared& previous, const DiscreteMeasure<int>& increment,
    double t) const {
  const auto& prev = static_cast<const PreparedPop&>(previous);
  auto prep = std::make_unique<PreparedPop>();
  prep->aggregate = (1.0 - t) * prev.aggregate;
  for (const auto& atom : increment.atoms()) {
    prep->aggregate[atom.point] += t * atom.weight;
  }
  prep->costs = base_->cost_table().Costs(prep->aggregate);
  return prep;
}

double PopulationFpGame::Cost(const int& action, const Prepared& eta) const {
  const auto& prep = static_cast<const PreparedPop&>(eta);
  FIELDPLAY_CHECK_ARG(action >= 0 && action < base_->n_actions(),
                      "action index out of range");
  return prep.costs[action];
}

int PopulationFpGame::BestResponse(int, const Prepared& eta,
                                   const int*) const {
  const auto& prep = static_cast<const PreparedPop&>(eta);
  return BestResponseFinite(
      std::span<const double>(prep.costs.data(), prep.costs.size()));
}

DiscreteMeasure<int> PopulationFpGame::MeasureFromSimplex(
    const Eigen::VectorXd& m) const {
  std::vector<DiscreteMeasure<int>::Atom> atoms;
  for (int j = 0; j < m.size(); ++j) {
    if (m[j] > 0.0) atoms.push_back({j, m[j]});
  }
  return DiscreteMeasure<int>::FromAtoms(std::move(atoms), metric_);
}

PopulationOmdGame::PopulationOmdGame(std::shared_ptr<const PopulationGame> base)
    : base_(std::move(base)), metric_(HalfL1Metric()) {}

std::unique_ptr<GameInstance<Eigen::VectorXd>::Prepared>
PopulationOmdGame::Prepare(const DiscreteMeasure<Eigen::VectorXd>& eta) const {
  auto prep = std::make_unique<PreparedPop>();
  prep->source = &eta;
  prep->aggregate = Aggregate(eta);
  prep->costs = base_->cost_table().Costs(prep->aggregate);
  return prep;
}

Eigen::VectorXd PopulationOmdGame::Aggregate(
    const DiscreteMeasure<Eigen::VectorXd>& eta) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(base_->n_actions());
  for (const auto& atom : eta.atoms()) {
    FIELDPLAY_CHECK_ARG(atom.point.size() == base_->n_actions(),
                        "mixed action has wrong dimension");
    m += atom.weight * atom.point;
  }
  return m;
}

double PopulationOmdGame::Cost(const Eigen::VectorXd& action,
                               const Prepared& eta) const {
  const auto& prep = static_cast<const PreparedPop&>(eta);
  return action.dot(prep.costs);
}

Eigen::VectorXd PopulationOmdGame::BestResponse(
    int, const Prepared& eta, const Eigen::VectorXd*) const {
  const auto& prep = static_cast<const PreparedPop&>(eta);
  int j = BestResponseFinite(
      std::span<const double>(prep.costs.data(), prep.costs.size()));
  Eigen::VectorXd vertex = Eigen::VectorXd::Zero(base_->n_actions());
  vertex[j] = 1.0;
  return vertex;
}

bool PopulationOmdGame::InActionSet(int, const Eigen::VectorXd& action,
                                    double tol) const {
  if (action.size() != base_->n_actions()) return false;
  if (action.minCoeff() < -tol) return false;
  return std::abs(action.sum() - 1.0) <= tol;
}

Eigen::VectorXd PopulationOmdGame::DefaultAction(int) const {
  Eigen::VectorXd vertex = Eigen::VectorXd::Zero(base_->n_actions());
  vertex[0] = 1.0;
  return vertex;
}

Eigen::VectorXd PopulationOmdGame::Subgradient(const Eigen::VectorXd&,
                                               const Prepared& eta) const {
  // J is linear in the own action, so the subgradient is the cost vector.
  return static_cast<const PreparedPop&>(eta).costs;
}

Eigen::VectorXd PopulationOmdGame::MirrorProject(
    int, const Eigen::VectorXd& dual) const {
  return ProjectToSimplex(dual);
}

Eigen::VectorXd PopulationOmdGame::DualStep(const Eigen::VectorXd& phi,
                                            const Eigen::VectorXd& y,
                                            double beta) const {
  return phi - beta * y;
}

}  // namespace fieldplay
