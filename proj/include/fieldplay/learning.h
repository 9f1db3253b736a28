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

#ifndef FIELDPLAY_LEARNING_H_
#define FIELDPLAY_LEARNING_H_

#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldplay/game.h"
#include "fieldplay/measure.h"
#include "fieldplay/parallel.h"

namespace fieldplay {

struct StopRule {
  int max_rounds = 500;
  double phi_tol = 1e-3;  // stop after 3 consecutive rounds below this
};

struct RoundRecord {
  int n = 0;
  double phi = 0.0;       // exploitability of the belief (FP) / play (OMD)
  double psi = 0.0;       // cost gap against the reference equilibrium
  double alpha = 0.0;     // subgradient pairing bound on psi (OMD only)
  double d1_ref = 0.0;    // d1 to the reference distribution
  double d1_step = 0.0;   // d1(eta_{n-1}, eta_n)
  double max_grad = 0.0;  // max dual norm of subgradients (OMD only)
  double ms = 0.0;        // wall time of the round
};

struct RunTrace {
  std::vector<RoundRecord> rows;
};

// Surrogate equilibrium used for psi/alpha/d1_ref diagnostics: a brute-force
// oracle on population games, a long tight fictitious-play run on MFGs.
template <typename Action>
struct Reference {
  DiscreteMeasure<Action> eta;
  std::optional<Profile<Action>> profile;
};

struct RunOptions {
  StopRule stop;
  int threads = 0;
  double beta_exponent = 1.0;  // OMD step n^{-p}; guarantees cover p = 1
  int lp_cap = 4096;           // cap for per-round Wasserstein diagnostics
  bool check_invariants = true;
  // Disable the per-round phi/psi/d1 columns (reference runs that only need
  // the final profile; the phi-based stopping rule is inactive then).
  bool compute_diagnostics = true;
};

// -- Fictitious play ----------------------------------------------------------

template <typename Action>
struct FpState {
  int round = 1;
  Profile<Action> profile;                           // Psi_n
  DiscreteMeasure<Action> eta;                       // eta_n
  DiscreteMeasure<Action> eta_bar;                   // running average
  std::vector<DiscreteMeasure<Action>> eta_history;  // eta_1 .. eta_n
  std::vector<Profile<Action>> profile_history;
};

template <typename Action>
FpState<Action> MakeFpInitialState(const GameInstance<Action>& game) {
  ValidatePlayerWeights(game);
  Profile<Action> psi;
  psi.reserve(game.NumPlayers());
  for (int i = 0; i < game.NumPlayers(); ++i) {
    psi.push_back(game.DefaultAction(i));
  }
  DiscreteMeasure<Action> eta = ProfilePushforward(game, psi);
  FpState<Action> state{1, psi, eta, eta, {eta}, {psi}};
  return state;
}

template <typename Action>
FpState<Action> MakeFpInitialState(const GameInstance<Action>& game,
                                   Profile<Action> psi) {
  ValidatePlayerWeights(game);
  DiscreteMeasure<Action> eta = ProfilePushforward(game, psi);
  return FpState<Action>{1, psi, eta, eta, {eta}, {psi}};
}

// One fictitious-play transition: best respond to the belief, push the new
// profile forward, fold it into the running average. Best-response failures
// abort the round tagged with the player.
template <typename Action>
void FpStep(const GameInstance<Action>& game, FpState<Action>& state,
            int threads = 0) {
  auto prep = game.Prepare(state.eta_bar);
  const int players = game.NumPlayers();
  Profile<Action> next(state.profile);
  ParallelFor(
      players,
      [&](int i) {
        next[i] = game.BestResponse(i, *prep, &state.profile[i]);
      },
      threads);
  DiscreteMeasure<Action> eta_next = ProfilePushforward(game, next);
  int n = state.round;
  state.eta_bar = state.eta_bar.Mix(eta_next, 1.0 / (n + 1));
  state.eta = eta_next;
  state.profile = std::move(next);
  state.round = n + 1;
  state.eta_history.push_back(state.eta);
  state.profile_history.push_back(state.profile);
}

// Checks that the incrementally mixed belief still equals the arithmetic
// mean (1/n) sum_k eta_k. Small supports get an exact atom-level match;
// larger ones a deterministic battery of 1-Lipschitz probe integrals.
template <typename Action>
void CheckMixtureIdentity(const FpState<Action>& state, double tol = 1e-9) {
  const auto& bar = state.eta_bar;
  FIELDPLAY_CHECK(std::abs(bar.TotalMass() - 1.0) <= tol,
                  "belief mass drifted");
  const int n = static_cast<int>(state.eta_history.size());
  long long total_atoms = 0;
  for (const auto& eta : state.eta_history) total_atoms += eta.size();

  if (total_atoms <= 512) {
    std::vector<typename DiscreteMeasure<Action>::Atom> atoms;
    atoms.reserve(total_atoms);
    for (const auto& eta : state.eta_history) {
      for (const auto& a : eta.atoms()) atoms.push_back({a.point, a.weight / n});
    }
    DiscreteMeasure<Action> direct =
        DiscreteMeasure<Action>::FromAtoms(std::move(atoms), bar.metric());
    FIELDPLAY_CHECK(direct.size() == bar.size(),
                    "belief support diverged from the history mean");
    for (const auto& a : direct.atoms()) {
      bool matched = false;
      for (const auto& b : bar.atoms()) {
        if (bar.Distance(a.point, b.point) < 1e-9) {
          FIELDPLAY_CHECK(std::abs(a.weight - b.weight) <= 1e-11,
                          "belief weight drifted from the history mean");
          matched = true;
          break;
        }
      }
      FIELDPLAY_CHECK(matched, "belief atom missing from the history mean");
    }
    return;
  }

  for (int probe = 0; probe < 4; ++probe) {
    std::uint64_t h = (static_cast<std::uint64_t>(n) * 2654435761ULL + probe);
    const auto& anchor_eta = state.eta_history[h % n];
    const Action& anchor =
        anchor_eta.atoms()[(h >> 16) % anchor_eta.size()].point;
    auto lip = [&](const Action& p) { return bar.Distance(anchor, p); };
    double via_bar = bar.Integrate(lip);
    double via_history = 0.0;
    for (const auto& eta : state.eta_history) via_history += eta.Integrate(lip);
    via_history /= n;
    FIELDPLAY_CHECK(std::abs(via_bar - via_history) <= tol,
                    "belief probe integral drifted from the history mean");
  }
}

// -- Online mirror descent ----------------------------------------------------

template <typename Action>
struct OmdState {
  int round = 1;
  Profile<Action> dual;     // Phi_n, identified with W
  Profile<Action> profile;  // Psi_n = Q_{A_i}(Phi_n)
  DiscreteMeasure<Action> eta;
  double beta_exponent = 1.0;

  double Beta() const { return std::pow(static_cast<double>(round),
                                        -beta_exponent); }
};

// Phi_1 is the representer of each player's default action, so Psi_1 equals
// the default profile and Phi_1 is bounded.
template <typename Action>
OmdState<Action> MakeOmdInitialState(const GameInstance<Action>& game,
                                     double beta_exponent = 1.0) {
  ValidatePlayerWeights(game);
  FIELDPLAY_CHECK_ARG(game.HasSubgradient(),
                      "mirror descent needs a game with subgradients");
  FIELDPLAY_CHECK_ARG(beta_exponent > 0.5 && beta_exponent <= 1.0,
                      "beta exponent must lie in (1/2, 1]");
  Profile<Action> dual;
  Profile<Action> psi;
  dual.reserve(game.NumPlayers());
  psi.reserve(game.NumPlayers());
  for (int i = 0; i < game.NumPlayers(); ++i) {
    dual.push_back(game.DefaultAction(i));
    psi.push_back(game.MirrorProject(i, dual.back()));
  }
  DiscreteMeasure<Action> eta = ProfilePushforward(game, psi);
  return OmdState<Action>{1, std::move(dual), std::move(psi), std::move(eta),
                          beta_exponent};
}

// One mirror-descent transition: dual subgradient step, mirror projection,
// pushforward. When provided, `subgradients` receives y(Psi_n(i), eta_n).
template <typename Action>
void OmdStep(const GameInstance<Action>& game, OmdState<Action>& state,
             int threads = 0, Profile<Action>* subgradients = nullptr,
             bool check_invariants = true) {
  auto prep = game.Prepare(state.eta);
  const int players = game.NumPlayers();
  const double beta = state.Beta();
  Profile<Action> y(state.profile);
  ParallelFor(
      players,
      [&](int i) { y[i] = game.Subgradient(state.profile[i], *prep); },
      threads);

  Profile<Action> dual_next(state.dual);
  Profile<Action> psi_next(state.profile);
  ParallelFor(
      players,
      [&](int i) {
        dual_next[i] = game.DualStep(state.dual[i], y[i], beta);
        psi_next[i] = game.MirrorProject(i, dual_next[i]);
        if (check_invariants) {
          // Q is 1/(2K)-Lipschitz for a K-strongly-convex h; with
          // h = 0.5*|.|^2 the constant is one, so each primal move is
          // bounded by the dual move.
          double moved = game.WDistance(psi_next[i], state.profile[i]);
          FIELDPLAY_CHECK(moved <= beta * game.WNorm(y[i]) + 1e-9,
                          "mirror step moved further than the dual step");
        }
      },
      threads);

  state.dual = std::move(dual_next);
  state.profile = std::move(psi_next);
  state.eta = ProfilePushforward(game, state.profile);
  state.round += 1;
  if (subgradients != nullptr) *subgradients = std::move(y);
}

// -- Run loop -----------------------------------------------------------------

enum class LoopKind { kFictitiousPlay, kMirrorDescent };

template <typename Action>
struct RunResult {
  RunTrace trace;
  bool converged = false;
  std::string error;
  std::optional<FpState<Action>> fp_final;
  std::optional<OmdState<Action>> omd_final;
  // Best responses computed against the final belief (FP only); the natural
  // reference profile once the run has converged.
  std::optional<Profile<Action>> final_best_response;
  double total_ms = 0.0;
};

namespace internal {

template <typename Action>
double ReferencePlayedCost(const GameInstance<Action>& game,
                           const Reference<Action>& ref,
                           const typename GameInstance<Action>::Prepared& prep) {
  return ref.eta.Integrate(
      [&](const Action& a) { return game.Cost(a, prep); });
}

}  // namespace internal

// Fictitious play with per-round diagnostics, continuing from an explicit
// round-1 state. Trace row n reflects the state at round n; phi_n uses the
// best responses against eta_bar_n, which become Psi_{n+1} when the loop
// continues.
template <typename Action>
RunResult<Action> RunFpFromState(const GameInstance<Action>& game,
                                 const RunOptions& options,
                                 FpState<Action> state,
                                 const Reference<Action>* reference = nullptr) {
  using Clock = std::chrono::steady_clock;
  auto run_start = Clock::now();
  RunResult<Action> result;
  if (options.stop.max_rounds <= 0) return result;
  std::unique_ptr<typename GameInstance<Action>::Prepared> ref_prep;
  double ref_played = 0.0;
  if (reference != nullptr) {
    ref_prep = game.Prepare(reference->eta);
    ref_played = internal::ReferencePlayedCost(game, *reference, *ref_prep);
  }

  int below_tol_streak = 0;
  try {
    for (int n = 1;; ++n) {
      auto round_start = Clock::now();
      auto prep = game.Prepare(state.eta_bar);
      const int players = game.NumPlayers();
      Profile<Action> br(state.profile);
      std::vector<double> br_cost(players);
      ParallelFor(
          players,
          [&](int i) {
            try {
              br[i] = game.BestResponse(i, *prep, &state.profile[i]);
            } catch (const std::exception& e) {
              throw std::runtime_error(internal::StrCat(
                  "round ", n, ", player ", i, ": ", e.what()));
            }
            if (options.check_invariants) {
              FIELDPLAY_CHECK(game.InActionSet(i, br[i], 1e-7),
                              "best response left player ", i,
                              "'s action set");
            }
            if (options.compute_diagnostics) {
              br_cost[i] = game.Cost(br[i], *prep);
            }
          },
          options.threads);

      RoundRecord row;
      row.n = n;
      if (options.compute_diagnostics) {
        double played = state.eta_bar.Integrate(
            [&](const Action& a) { return game.Cost(a, *prep); });
        double responded = 0.0;
        for (int i = 0; i < players; ++i) {
          responded += game.PlayerWeight(i) * br_cost[i];
        }
        row.phi = played - responded;
        if (options.check_invariants && game.ReliableBestResponse()) {
          FIELDPLAY_CHECK(row.phi >= -1e-9, "phi_n = ", row.phi,
                          " negative at round ", n);
        }
        if (reference != nullptr) {
          row.psi = state.eta.Integrate([&](const Action& a) {
            return game.Cost(a, *ref_prep);
          }) - ref_played;
          row.d1_ref =
              state.eta_bar.Wasserstein1(reference->eta, options.lp_cap);
        }
        if (n >= 2) {
          row.d1_step = state.eta_history[n - 2].Wasserstein1(
              state.eta_history[n - 1], options.lp_cap);
        }
      }
      row.ms = std::chrono::duration<double, std::milli>(Clock::now() -
                                                         round_start).count();
      result.trace.rows.push_back(row);

      below_tol_streak = options.compute_diagnostics &&
                                 row.phi < options.stop.phi_tol
                             ? below_tol_streak + 1
                             : 0;
      if (below_tol_streak >= 3) {
        result.converged = true;
        result.final_best_response = std::move(br);
        break;
      }
      if (n >= options.stop.max_rounds) {
        result.final_best_response = std::move(br);
        break;
      }

      DiscreteMeasure<Action> eta_next = ProfilePushforward(game, br);
      state.eta_bar = state.eta_bar.Mix(eta_next, 1.0 / (n + 1));
      state.eta = std::move(eta_next);
      state.profile = std::move(br);
      state.round = n + 1;
      state.eta_history.push_back(state.eta);
      state.profile_history.push_back(state.profile);

      if (options.check_invariants &&
          (state.round <= 64 || state.round % 37 == 0)) {
        CheckMixtureIdentity(state);
      }
    }
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  result.fp_final = std::move(state);
  result.total_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - run_start)
          .count();
  return result;
}

template <typename Action>
RunResult<Action> RunFp(const GameInstance<Action>& game,
                        const RunOptions& options,
                        const Reference<Action>* reference = nullptr) {
  if (options.stop.max_rounds <= 0) return RunResult<Action>{};
  return RunFpFromState(game, options, MakeFpInitialState(game), reference);
}

// Online mirror descent with per-round diagnostics. phi_n is the
// exploitability of eta_n itself (fresh best responses), psi_n and alpha_n
// are measured against the reference when available.
template <typename Action>
RunResult<Action> RunOmd(const GameInstance<Action>& game,
                         const RunOptions& options,
                         const Reference<Action>* reference = nullptr) {
  using Clock = std::chrono::steady_clock;
  auto run_start = Clock::now();
  RunResult<Action> result;
  if (options.stop.max_rounds <= 0) return result;

  OmdState<Action> state = MakeOmdInitialState(game, options.beta_exponent);
  std::unique_ptr<typename GameInstance<Action>::Prepared> ref_prep;
  double ref_played = 0.0;
  if (reference != nullptr) {
    ref_prep = game.Prepare(reference->eta);
    ref_played = internal::ReferencePlayedCost(game, *reference, *ref_prep);
  }

  const int players = game.NumPlayers();
  double phi0_max = 0.0;
  for (int i = 0; i < players; ++i) {
    phi0_max = std::max(phi0_max, game.WNorm(state.dual[i]));
  }
  double grad_bound = 0.0;  // running max of subgradient norms ("k")
  double beta_sum = 0.0;
  DiscreteMeasure<Action> eta_prev = state.eta;

  int below_tol_streak = 0;
  try {
    for (int n = 1;; ++n) {
      auto round_start = Clock::now();
      auto prep = game.Prepare(state.eta);

      Profile<Action> y(state.profile);
      std::vector<double> y_norm(players), gap(players);
      ParallelFor(
          players,
          [&](int i) {
            try {
              y[i] = game.Subgradient(state.profile[i], *prep);
              y_norm[i] = game.WNorm(y[i]);
              if (options.compute_diagnostics) {
                Action br = game.BestResponse(i, *prep, &state.profile[i]);
                gap[i] =
                    game.Cost(state.profile[i], *prep) - game.Cost(br, *prep);
              }
            } catch (const std::exception& e) {
              throw std::runtime_error(internal::StrCat(
                  "round ", n, ", player ", i, ": ", e.what()));
            }
          },
          options.threads);

      RoundRecord row;
      row.n = n;
      for (int i = 0; i < players; ++i) {
        row.phi += game.PlayerWeight(i) * gap[i];
        row.max_grad = std::max(row.max_grad, y_norm[i]);
      }
      if (options.compute_diagnostics && reference != nullptr) {
        row.psi = state.eta.Integrate([&](const Action& a) {
          return game.Cost(a, *ref_prep);
        }) - ref_played;
        row.d1_ref = state.eta.Wasserstein1(reference->eta, options.lp_cap);
        if (reference->profile.has_value()) {
          const auto& ref_profile = *reference->profile;
          for (int i = 0; i < players; ++i) {
            row.alpha += game.PlayerWeight(i) *
                         game.DualPairing(y[i], state.profile[i],
                                          ref_profile[i]);
          }
        }
      }
      if (options.compute_diagnostics && n >= 2) {
        row.d1_step = eta_prev.Wasserstein1(state.eta, options.lp_cap);
      }
      row.ms = std::chrono::duration<double, std::milli>(Clock::now() -
                                                         round_start).count();
      result.trace.rows.push_back(row);

      below_tol_streak = options.compute_diagnostics &&
                                 row.phi < options.stop.phi_tol
                             ? below_tol_streak + 1
                             : 0;
      if (below_tol_streak >= 3) {
        result.converged = true;
        break;
      }
      if (n >= options.stop.max_rounds) break;

      // Advance in place, reusing the subgradients computed above.
      const double beta = state.Beta();
      eta_prev = state.eta;
      Profile<Action> dual_next(state.dual);
      Profile<Action> psi_next(state.profile);
      ParallelFor(
          players,
          [&](int i) {
            dual_next[i] = game.DualStep(state.dual[i], y[i], beta);
            psi_next[i] = game.MirrorProject(i, dual_next[i]);
            if (options.check_invariants) {
              double moved = game.WDistance(psi_next[i], state.profile[i]);
              FIELDPLAY_CHECK(moved <= beta * y_norm[i] + 1e-9,
                              "mirror step moved further than the dual step");
              FIELDPLAY_CHECK(game.InActionSet(i, psi_next[i], 1e-7),
                              "mirror projection left player ", i,
                              "'s action set");
            }
          },
          options.threads);
      state.dual = std::move(dual_next);
      state.profile = std::move(psi_next);
      state.eta = ProfilePushforward(game, state.profile);
      state.round = n + 1;

      if (options.check_invariants) {
        grad_bound = std::max(grad_bound, row.max_grad);
        beta_sum += beta;
        for (int i = 0; i < players; ++i) {
          FIELDPLAY_CHECK(
              game.WNorm(state.dual[i]) <=
                  phi0_max + grad_bound * beta_sum + 1e-9,
              "dual norm exceeded the harmonic growth bound");
        }
      }
    }
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  result.omd_final = std::move(state);
  result.total_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - run_start)
          .count();
  return result;
}

// Fictitious play stripped to the iterates: no trace, no belief measure,
// just the final best-response profile against the round-`rounds` belief.
// Uses the game's incremental snapshot when available, so the cost per round
// stays independent of the round index; falls back to the full mixture
// otherwise. This is the reference-equilibrium builder for psi diagnostics.
template <typename Action>
Profile<Action> FpReferenceProfile(const GameInstance<Action>& game,
                                   int rounds, int threads = 0) {
  ValidatePlayerWeights(game);
  FIELDPLAY_CHECK_ARG(rounds >= 1, "reference run needs at least one round");
  const int players = game.NumPlayers();
  Profile<Action> profile;
  profile.reserve(players);
  for (int i = 0; i < players; ++i) profile.push_back(game.DefaultAction(i));

  DiscreteMeasure<Action> belief = ProfilePushforward(game, profile);
  auto prep = game.Prepare(belief);
  // Support for incremental snapshots is a static property of the game;
  // probe it once with a no-op mix.
  const bool incremental = game.PrepareMix(*prep, belief, 0.0) != nullptr;

  auto respond = [&](Profile<Action>& out) {
    ParallelFor(
        players,
        [&](int i) { out[i] = game.BestResponse(i, *prep, &profile[i]); },
        threads);
  };

  for (int n = 1; n < rounds; ++n) {
    Profile<Action> next(profile);
    respond(next);
    DiscreteMeasure<Action> eta_next = ProfilePushforward(game, next);
    if (incremental) {
      auto mixed = game.PrepareMix(*prep, eta_next, 1.0 / (n + 1));
      FIELDPLAY_CHECK(mixed != nullptr, "incremental snapshot vanished");
      prep = std::move(mixed);
    } else {
      belief = belief.Mix(eta_next, 1.0 / (n + 1));
      prep = game.Prepare(belief);
    }
    profile = std::move(next);
  }
  Profile<Action> final_response(profile);
  respond(final_response);
  return final_response;
}

// Oracle for the scalar decay argument: a nonnegative sequence with
//   phi_{n+1} - phi_n <= -phi_n/(n+1) + eps_n/n  and  eps_n -> 0
// must converge to zero; the proof gives n*phi_n <= phi_1 + 2*sum |eps_i|.
// Returns true iff the recursion hypothesis holds at every index and the
// tail of phi obeys the derived bound.
bool SequenceLemmaCheck(std::span<const double> phi,
                        std::span<const double> eps);

}  // namespace fieldplay

#endif  // FIELDPLAY_LEARNING_H_
