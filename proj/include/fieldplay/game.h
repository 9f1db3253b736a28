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

#ifndef FIELDPLAY_GAME_H_
#define FIELDPLAY_GAME_H_

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fieldplay/common.h"
#include "fieldplay/measure.h"
#include "fieldplay/parallel.h"

namespace fieldplay {

// One action per player, aligned with the game's player list.
template <typename Action>
using Profile = std::vector<Action>;

// Anonymous game with player-dependent action sets and a shared cost
// J(action, measure). Implementations must be stateless (or internally
// synchronized): per-player calls run in parallel within a round against an
// immutable Prepared snapshot.
template <typename Action>
class GameInstance {
 public:
  virtual ~GameInstance() = default;

  // Per-round snapshot of an action distribution. Games attach whatever
  // caches they need (aggregates, marginals) so that Cost/BestResponse/
  // Subgradient are cheap and pure afterwards.
  struct Prepared {
    virtual ~Prepared() = default;
    const DiscreteMeasure<Action>* source = nullptr;
  };

  virtual int NumPlayers() const = 0;
  virtual double PlayerWeight(int player) const = 0;
  virtual MetricPtrOf<Action> ActionMetric() const = 0;

  virtual std::unique_ptr<Prepared> Prepare(
      const DiscreteMeasure<Action>& eta) const {
    auto p = std::make_unique<Prepared>();
    p->source = &eta;
    return p;
  }

  // Incremental snapshot of (1-t)*previous + t*increment, for loops whose
  // belief is a running mixture. Games return nullptr when they cannot do
  // this cheaply; callers then rebuild from the full mixture measure.
  virtual std::unique_ptr<Prepared> PrepareMix(
      const Prepared& previous, const DiscreteMeasure<Action>& increment,
      double t) const {
    (void)previous;
    (void)increment;
    (void)t;
    return nullptr;
  }

  virtual double Cost(const Action& action, const Prepared& eta) const = 0;
  virtual Action BestResponse(int player, const Prepared& eta,
                              const Action* warm_start = nullptr) const = 0;
  virtual bool InActionSet(int player, const Action& action,
                           double tol) const = 0;
  virtual Action DefaultAction(int player) const = 0;

  // True when BestResponse is an exact minimizer (finite games) or the
  // problem is convex enough that the solver certifies global optimality.
  virtual bool ReliableBestResponse() const { return false; }
  // True when the builtin cost is monotone by construction.
  virtual bool MonotoneCost() const { return false; }

  // -- Mirror-descent capabilities (opt in) ---------------------------------

  virtual bool HasSubgradient() const { return false; }
  // Subgradient y(a, eta), identified with an element of W.
  virtual Action Subgradient(const Action& action, const Prepared& eta) const {
    (void)action;
    (void)eta;
    throw std::logic_error("fieldplay: game exposes no subgradient");
  }
  // Q_{A_i}: maximizer of <y,a> - h(a) over the player's action set.
  virtual Action MirrorProject(int player, const Action& dual) const {
    (void)player;
    (void)dual;
    throw std::logic_error("fieldplay: game exposes no mirror projection");
  }
  // phi - beta * y in the dual space.
  virtual Action DualStep(const Action& phi, const Action& y,
                          double beta) const {
    (void)phi;
    (void)y;
    (void)beta;
    throw std::logic_error("fieldplay: game exposes no dual arithmetic");
  }
  virtual double WNorm(const Action& a) const {
    (void)a;
    throw std::logic_error("fieldplay: game exposes no W norm");
  }
  virtual double WDistance(const Action& a, const Action& b) const {
    (void)a;
    (void)b;
    throw std::logic_error("fieldplay: game exposes no W distance");
  }
  // <y, a - b> for a dual y.
  virtual double DualPairing(const Action& y, const Action& a,
                             const Action& b) const {
    (void)y;
    (void)a;
    (void)b;
    throw std::logic_error("fieldplay: game exposes no dual pairing");
  }
};

template <typename Action>
void ValidatePlayerWeights(const GameInstance<Action>& game) {
  double sum = 0.0;
  for (int i = 0; i < game.NumPlayers(); ++i) {
    double w = game.PlayerWeight(i);
    FIELDPLAY_CHECK_ARG(IsFinite(w) && w > 0.0,
                        "player weight must be positive");
    sum += w;
  }
  FIELDPLAY_CHECK_ARG(std::abs(sum - 1.0) <= 1e-9,
                      "player weights sum to ", sum, ", expected 1");
}

// eta = Psi # lambda.
template <typename Action>
DiscreteMeasure<Action> ProfilePushforward(const GameInstance<Action>& game,
                                           const Profile<Action>& psi) {
  FIELDPLAY_CHECK_ARG(
      static_cast<int>(psi.size()) == game.NumPlayers(),
      "profile has ", psi.size(), " actions for ", game.NumPlayers(),
      " players");
  std::vector<std::pair<Action, double>> weighted;
  weighted.reserve(psi.size());
  for (int i = 0; i < game.NumPlayers(); ++i) {
    weighted.emplace_back(psi[i], game.PlayerWeight(i));
  }
  return DiscreteMeasure<Action>::Pushforward(weighted, game.ActionMetric());
}

// Exploitability of the distribution eta itself:
//   integral of J(., eta) d eta  -  sum_i lambda_i J(BR(i, eta), eta).
// For fictitious play this evaluates phi_n at eta = eta_bar_n exactly, since
// the mixture is itself the pushforward of the played history.
template <typename Action>
double Exploitability(const GameInstance<Action>& game,
                      const DiscreteMeasure<Action>& eta, int threads = 0) {
  auto prep = game.Prepare(eta);
  double played = eta.Integrate(
      [&](const Action& a) { return game.Cost(a, *prep); });
  const int players = game.NumPlayers();
  std::vector<double> br_cost(players);
  ParallelFor(
      players,
      [&](int i) {
        br_cost[i] = game.Cost(game.BestResponse(i, *prep), *prep);
      },
      threads);
  double responded = 0.0;
  for (int i = 0; i < players; ++i) {
    responded += game.PlayerWeight(i) * br_cost[i];
  }
  return played - responded;
}

// Exploitability of a specific profile against eta:
//   sum_i lambda_i [ J(psi(i), eta) - J(BR(i, eta), eta) ].
template <typename Action>
double Exploitability(const GameInstance<Action>& game,
                      const DiscreteMeasure<Action>& eta,
                      const Profile<Action>& psi, int threads = 0) {
  FIELDPLAY_CHECK_ARG(
      static_cast<int>(psi.size()) == game.NumPlayers(),
      "profile/player count mismatch");
  auto prep = game.Prepare(eta);
  const int players = game.NumPlayers();
  std::vector<double> gap(players);
  ParallelFor(
      players,
      [&](int i) {
        gap[i] = game.Cost(psi[i], *prep) -
                 game.Cost(game.BestResponse(i, *prep), *prep);
      },
      threads);
  double total = 0.0;
  for (int i = 0; i < players; ++i) total += game.PlayerWeight(i) * gap[i];
  return total;
}

struct MonotonicityReport {
  double min_value = 0.0;
  int violations = 0;       // pairs with bilinear value < -tol
  int witness_index = -1;   // index of the worst violating pair, -1 if none
  double tol = 1e-9;
  int pairs = 0;

  nlohmann::json ToJson() const {
    return nlohmann::json{{"min_value", min_value},
                          {"violations", violations},
                          {"witness_index", witness_index},
                          {"tolerance", tol},
                          {"pairs", pairs}};
  }
};

// Monotonicity integrand for one measure pair:
//   integral of (J(a, eta) - J(a, eta')) d(eta - eta')(a).
template <typename Action>
double MonotonicityValue(const GameInstance<Action>& game,
                         const DiscreteMeasure<Action>& eta,
                         const DiscreteMeasure<Action>& eta_prime) {
  auto lhs = game.Prepare(eta);
  auto rhs = game.Prepare(eta_prime);
  auto cost_lhs = [&](const Action& a) { return game.Cost(a, *lhs); };
  auto cost_rhs = [&](const Action& a) { return game.Cost(a, *rhs); };
  return (eta.Integrate(cost_lhs) - eta_prime.Integrate(cost_lhs)) -
         (eta.Integrate(cost_rhs) - eta_prime.Integrate(cost_rhs));
}

// Sampled falsifier: monotonicity over the whole reachable set is not
// machine-checkable, so violations are data, not errors.
template <typename Action>
MonotonicityReport CheckMonotonicity(
    const GameInstance<Action>& game,
    std::span<const std::pair<DiscreteMeasure<Action>, DiscreteMeasure<Action>>>
        sample_pairs,
    double tol = 1e-9) {
  MonotonicityReport report;
  report.tol = tol;
  report.pairs = static_cast<int>(sample_pairs.size());
  bool first = true;
  for (std::size_t k = 0; k < sample_pairs.size(); ++k) {
    double value =
        MonotonicityValue(game, sample_pairs[k].first, sample_pairs[k].second);
    if (first || value < report.min_value) {
      first = false;
      if (value < -tol) report.witness_index = static_cast<int>(k);
      report.min_value = value;
    }
    if (value < -tol) ++report.violations;
  }
  return report;
}

// Nash test: every player's action is tol-optimal against the profile's own
// pushforward.
template <typename Action>
bool VerifyEquilibrium(const GameInstance<Action>& game,
                       const Profile<Action>& psi, double tol,
                       int threads = 0) {
  DiscreteMeasure<Action> eta = ProfilePushforward(game, psi);
  auto prep = game.Prepare(eta);
  const int players = game.NumPlayers();
  std::vector<char> ok(players, 0);
  ParallelFor(
      players,
      [&](int i) {
        double played = game.Cost(psi[i], *prep);
        double best = game.Cost(game.BestResponse(i, *prep), *prep);
        ok[i] = played <= best + tol ? 1 : 0;
      },
      threads);
  for (int i = 0; i < players; ++i) {
    if (!ok[i]) return false;
  }
  return true;
}

}  // namespace fieldplay

#endif  // FIELDPLAY_GAME_H_
