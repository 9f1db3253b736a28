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

#ifndef FIELDPLAY_POPULATION_H_
#define FIELDPLAY_POPULATION_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fieldplay/game.h"
#include "fieldplay/measure.h"

namespace fieldplay {

// Index of the minimum cost; ties break to the lowest index.
int BestResponseFinite(std::span<const double> costs);

// Euclidean projection onto the probability simplex.
Eigen::VectorXd ProjectToSimplex(const Eigen::VectorXd& y);

// Named single-population cost tables c_j(m) on the simplex.
struct PopulationCostTable {
  enum class Kind {
    kCongestionLinear,  // c_j(m) = m_j
    kCongestionAffine,  // c_j(m) = slope_j * m_j + offset_j
    kConstant,          // c_j(m) = offset_j
    kAntiCongestion,    // c_j(m) = -m_j (anti-monotone toy)
  };

  Kind kind = Kind::kCongestionLinear;
  std::vector<double> slope;
  std::vector<double> offset;

  static PopulationCostTable FromName(const std::string& name, int n_actions,
                                      std::vector<double> slope = {},
                                      std::vector<double> offset = {});

  double Cost(int action, const Eigen::VectorXd& m) const;
  Eigen::VectorXd Costs(const Eigen::VectorXd& m) const;
  bool Monotone() const;
  std::string Name() const;
};

// Finite-action anonymous game with one population: K players, identical
// action set {0, .., n_actions-1}, discrete ground metric so that d1 between
// empirical action distributions equals total-variation distance.
class PopulationGame {
 public:
  PopulationGame(int n_actions, PopulationCostTable cost, int players);

  int n_actions() const { return n_actions_; }
  int players() const { return players_; }
  const PopulationCostTable& cost_table() const { return cost_; }

  struct BruteForceResult {
    Eigen::VectorXd point;   // grid point minimizing the support gap
    double gap = 0.0;        // max_{j in supp} c_j - min_k c_k at the point
  };

  // Grid search over the simplex with denominators `grid`. The returned gap
  // is at most 2/grid times the cost table's Lipschitz bound away from the
  // best achievable.
  BruteForceResult BruteForceEquilibrium(int grid) const;

 private:
  int n_actions_;
  PopulationCostTable cost_;
  int players_;
};

// Pure-action view used by fictitious play. Actions are indices; best
// responses are exact argmins.
class PopulationFpGame : public GameInstance<int> {
 public:
  explicit PopulationFpGame(std::shared_ptr<const PopulationGame> base);

  int NumPlayers() const override { return base_->players(); }
  double PlayerWeight(int) const override { return 1.0 / base_->players(); }
  MetricPtrOf<int> ActionMetric() const override { return metric_; }

  struct PreparedPop : Prepared {
    Eigen::VectorXd aggregate;  // simplex point m
    Eigen::VectorXd costs;      // c_j(m)
  };

  std::unique_ptr<Prepared> Prepare(
      const DiscreteMeasure<int>& eta) const override;
  std::unique_ptr<Prepared> PrepareMix(const Prepared& previous,
                                       const DiscreteMeasure<int>& increment,
                                       double t) const override;
  double Cost(const int& action, const Prepared& eta) const override;
  int BestResponse(int player, const Prepared& eta,
                   const int* warm_start) const override;
  bool InActionSet(int, const int& action, double) const override {
    return action >= 0 && action < base_->n_actions();
  }
  int DefaultAction(int) const override { return 0; }
  bool ReliableBestResponse() const override { return true; }
  bool MonotoneCost() const override { return base_->cost_table().Monotone(); }

  const PopulationGame& base() const { return *base_; }

  // Measure over action indices from a simplex point (e.g. an oracle output).
  DiscreteMeasure<int> MeasureFromSimplex(const Eigen::VectorXd& m) const;

 private:
  std::shared_ptr<const PopulationGame> base_;
  MetricPtrOf<int> metric_;
};

// Mixed-action view used by online mirror descent: actions are simplex
// points (pure actions sit at the vertices), the cost extends linearly in
// the player's own mixed action, and with h = 0.5*|.|^2 the mirror map is
// the Euclidean simplex projection. Ground metric 0.5*l1 keeps vertex
// distances consistent with the discrete metric of the pure view.
class PopulationOmdGame : public GameInstance<Eigen::VectorXd> {
 public:
  explicit PopulationOmdGame(std::shared_ptr<const PopulationGame> base);

  int NumPlayers() const override { return base_->players(); }
  double PlayerWeight(int) const override { return 1.0 / base_->players(); }
  MetricPtrOf<Eigen::VectorXd> ActionMetric() const override { return metric_; }

  struct PreparedPop : Prepared {
    Eigen::VectorXd aggregate;
    Eigen::VectorXd costs;
  };

  std::unique_ptr<Prepared> Prepare(
      const DiscreteMeasure<Eigen::VectorXd>& eta) const override;
  double Cost(const Eigen::VectorXd& action, const Prepared& eta) const override;
  Eigen::VectorXd BestResponse(int player, const Prepared& eta,
                               const Eigen::VectorXd* warm_start) const override;
  bool InActionSet(int, const Eigen::VectorXd& action,
                   double tol) const override;
  Eigen::VectorXd DefaultAction(int) const override;
  bool ReliableBestResponse() const override { return true; }
  bool MonotoneCost() const override { return base_->cost_table().Monotone(); }

  bool HasSubgradient() const override { return true; }
  Eigen::VectorXd Subgradient(const Eigen::VectorXd& action,
                              const Prepared& eta) const override;
  Eigen::VectorXd MirrorProject(int player,
                                const Eigen::VectorXd& dual) const override;
  Eigen::VectorXd DualStep(const Eigen::VectorXd& phi,
                           const Eigen::VectorXd& y,
                           double beta) const override;
  double WNorm(const Eigen::VectorXd& a) const override { return a.norm(); }
  double WDistance(const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) const override {
    return (a - b).norm();
  }
  double DualPairing(const Eigen::VectorXd& y, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& b) const override {
    return y.dot(a - b);
  }

  const PopulationGame& base() const { return *base_; }

  // Population share of each action induced by eta (mean mixed action).
  Eigen::VectorXd Aggregate(const DiscreteMeasure<Eigen::VectorXd>& eta) const;

 private:
  std::shared_ptr<const PopulationGame> base_;
  MetricPtrOf<Eigen::VectorXd> metric_;
};

}  // namespace fieldplay

#endif  // FIELDPLAY_POPULATION_H_
