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

#include "fieldplay/runner.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "fieldplay/rng.h"

namespace fieldplay {
namespace {

std::string FormatDouble(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("fieldplay: cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw std::runtime_error("fieldplay: short write to " + path.string());
  }
}

constexpr const char* kPlotScript = R"py(#!/usr/bin/env python3
"""Renders the convergence diagnostics of a fieldplay run on log axes."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "trace.csv")
rows = list(csv.DictReader(open(path)))
if not rows:
    print("empty trace, nothing to plot")
    sys.exit(0)

n = [int(r["n"]) for r in rows]
series = {
    "phi": [float(r["phi"]) for r in rows],
    "psi": [float(r["psi"]) for r in rows],
    "d1_ref": [float(r["d1_ref"]) for r in rows],
    "d1_step": [float(r["d1_step"]) for r in rows],
}

fig, ax = plt.subplots(figsize=(7, 4.5))
for name, values in series.items():
    positive = [(x, y) for x, y in zip(n, values) if y > 0]
    if positive:
        ax.loglog([p[0] for p in positive], [p[1] for p in positive],
                  label=name)
ax.set_xlabel("round n")
ax.set_ylabel("diagnostic (log scale)")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
out = os.path.join(os.path.dirname(path), "plot.png")
fig.savefig(out, dpi=150)
print("wrote", out)
)py";

template <typename Action>
nlohmann::json MeasureJson(
    const DiscreteMeasure<Action>& measure,
    const std::function<nlohmann::json(const Action&)>& encode) {
  return measure.ToJson(encode);
}

struct RunArtifacts {
  RunTrace trace;
  bool converged = false;
  std::string error;
  double total_ms = 0.0;
  nlohmann::json final_distribution;
  nlohmann::json extras;
};

RunOptions MakeRunOptions(const ExperimentConfig& cfg) {
  RunOptions options;
  options.stop = cfg.learner.stop;
  options.threads = cfg.threads;
  options.beta_exponent = cfg.learner.beta_exponent;
  options.lp_cap = cfg.lp_cap;
  return options;
}

int ReferenceRounds(const ExperimentConfig& cfg) {
  if (cfg.reference.rounds > 0) return cfg.reference.rounds;
  return 4 * std::max(1, cfg.learner.stop.max_rounds);
}

RunArtifacts RunPopulation(const ExperimentConfig& cfg, bool quiet) {
  auto base = std::make_shared<const PopulationGame>(
      cfg.population.n_actions,
      PopulationCostTable::FromName(cfg.population.cost,
                                    cfg.population.n_actions,
                                    cfg.population.slope,
                                    cfg.population.offset),
      cfg.players);
  RunArtifacts artifacts;
  RunOptions options = MakeRunOptions(cfg);

  bool want_reference = cfg.reference.kind == "auto"
                            ? true
                            : cfg.reference.kind != "none";
  FIELDPLAY_CHECK_ARG(cfg.reference.kind != "fp",
                      "reference.kind fp is for MFG experiments; population "
                      "games use the brute-force oracle");
  std::optional<PopulationGame::BruteForceResult> oracle;
  if (want_reference) {
    oracle = base->BruteForceEquilibrium(cfg.population.oracle_grid);
    if (!quiet) {
      std::cerr << "reference: brute-force oracle gap " << oracle->gap
                << " on grid " << cfg.population.oracle_grid << "\n";
    }
    artifacts.extras["oracle_gap"] = oracle->gap;
  }

  if (cfg.learner.type == "fp") {
    PopulationFpGame game(base);
    if (cfg.audit_monotonicity > 0) {
      Rng rng(cfg.seed ^ 0xa5a5a5a5ULL);
      std::vector<std::pair<DiscreteMeasure<int>, DiscreteMeasure<int>>> pairs;
      auto random_eta = [&]() {
        Profile<int> psi(cfg.players);
        for (int i = 0; i < cfg.players; ++i) {
          psi[i] = rng.NextIndex(cfg.population.n_actions);
        }
        return ProfilePushforward<int>(game, psi);
      };
      for (int k = 0; k < cfg.audit_monotonicity; ++k) {
        pairs.emplace_back(random_eta(), random_eta());
      }
      artifacts.extras["monotonicity"] =
          CheckMonotonicity<int>(game, pairs).ToJson();
    }
    std::optional<Reference<int>> ref;
    if (oracle.has_value()) {
      ref.emplace(Reference<int>{game.MeasureFromSimplex(oracle->point), {}});
    }
    RunResult<int> result;
    if (cfg.population.initial == "random") {
      // Seed-scrambled initial profile; the run itself is deterministic.
      Rng rng(cfg.seed);
      Profile<int> psi(cfg.players);
      for (int i = 0; i < cfg.players; ++i) {
        psi[i] = rng.NextIndex(cfg.population.n_actions);
      }
      FpState<int> state = MakeFpInitialState<int>(game, std::move(psi));
      // Run from the custom state by replaying the generic loop.
      result = RunFpFromState(game, options, state,
                              ref.has_value() ? &*ref : nullptr);
    } else {
      result = RunFp<int>(game, options, ref.has_value() ? &*ref : nullptr);
    }
    artifacts.trace = std::move(result.trace);
    artifacts.converged = result.converged;
    artifacts.error = result.error;
    artifacts.total_ms = result.total_ms;
    if (result.fp_final.has_value()) {
      artifacts.final_distribution = MeasureJson<int>(
          result.fp_final->eta_bar,
          [](const int& a) { return nlohmann::json::array({a}); });
    }
  } else {
    PopulationOmdGame game(base);
    std::optional<Reference<Eigen::VectorXd>> ref;
    if (oracle.has_value()) {
      Profile<Eigen::VectorXd> ref_profile(cfg.players, oracle->point);
      std::vector<std::pair<Eigen::VectorXd, double>> atom = {
          {oracle->point, 1.0}};
      ref.emplace(Reference<Eigen::VectorXd>{
          DiscreteMeasure<Eigen::VectorXd>::Pushforward(atom,
                                                        game.ActionMetric()),
          std::move(ref_profile)});
    }
    RunResult<Eigen::VectorXd> result =
        RunOmd<Eigen::VectorXd>(game, options, ref.has_value() ? &*ref : nullptr);
    artifacts.trace = std::move(result.trace);
    artifacts.converged = result.converged;
    artifacts.error = result.error;
    artifacts.total_ms = result.total_ms;
    if (result.omd_final.has_value()) {
      artifacts.final_distribution = MeasureJson<Eigen::VectorXd>(
          result.omd_final->eta, [](const Eigen::VectorXd& a) {
            nlohmann::json arr = nlohmann::json::array();
            for (int c = 0; c < a.size(); ++c) arr.push_back(a[c]);
            return arr;
          });
    }
  }
  return artifacts;
}

RunArtifacts RunMfg(const ExperimentConfig& cfg, bool quiet) {
  MfgGame game(cfg.mfg, cfg.players, cfg.seed);
  RunArtifacts artifacts;
  RunOptions options = MakeRunOptions(cfg);

  if (cfg.audit_monotonicity > 0) {
    Rng rng(cfg.seed ^ 0xa5a5a5a5ULL);
    const MfgConfig& m = cfg.mfg;
    auto random_eta = [&]() {
      Profile<Trajectory> psi;
      for (int i = 0; i < cfg.players; ++i) {
        Trajectory t = game.DefaultAction(i);
        for (int k = 0; k < m.nt; ++k) {
          for (int c = 0; c < m.d; ++c) t.vel(k, c) = rng.Uniform(-1.0, 1.0);
        }
        psi.push_back(game.MirrorProject(i, t));
      }
      return ProfilePushforward<Trajectory>(game, psi);
    };
    std::vector<std::pair<DiscreteMeasure<Trajectory>,
                          DiscreteMeasure<Trajectory>>> pairs;
    for (int k = 0; k < cfg.audit_monotonicity; ++k) {
      pairs.emplace_back(random_eta(), random_eta());
    }
    artifacts.extras["monotonicity"] =
        CheckMonotonicity<Trajectory>(game, pairs).ToJson();
  }

  bool want_reference;
  if (cfg.reference.kind == "auto") {
    want_reference = cfg.learner.type == "omd";
  } else {
    want_reference = cfg.reference.kind != "none";
  }
  FIELDPLAY_CHECK_ARG(cfg.reference.kind != "brute-force",
                      "reference.kind brute-force applies to population games");

  std::optional<Reference<Trajectory>> ref;
  if (want_reference) {
    int ref_rounds = ReferenceRounds(cfg);
    if (!quiet) {
      std::cerr << "reference: fictitious-play run, " << ref_rounds
                << " rounds\n";
    }
    Profile<Trajectory> profile =
        FpReferenceProfile<Trajectory>(game, ref_rounds, cfg.threads);
    ref.emplace(Reference<Trajectory>{
        ProfilePushforward<Trajectory>(game, profile), std::move(profile)});
  }

  RunResult<Trajectory> result;
  if (cfg.learner.type == "fp") {
    result = RunFp<Trajectory>(game, options, ref.has_value() ? &*ref : nullptr);
    if (result.fp_final.has_value()) {
      artifacts.final_distribution = MeasureJson<Trajectory>(
          result.fp_final->eta,
          [](const Trajectory& t) { return t.ToJson(); });
    }
  } else {
    result = RunOmd<Trajectory>(game, options, ref.has_value() ? &*ref : nullptr);
    if (result.omd_final.has_value()) {
      artifacts.final_distribution = MeasureJson<Trajectory>(
          result.omd_final->eta,
          [](const Trajectory& t) { return t.ToJson(); });
    }
  }
  artifacts.trace = std::move(result.trace);
  artifacts.converged = result.converged;
  artifacts.error = result.error;
  artifacts.total_ms = result.total_ms;
  artifacts.extras["velocity_bound_hits"] = game.VelocityBoundHits();
  artifacts.extras["monotone_cost"] = game.MonotoneCost();
  artifacts.extras["convex_cost"] = game.problem().ConvexCost();
  if (game.VelocityBoundHits() > 0 && !quiet) {
    std::cerr << "warning: " << game.VelocityBoundHits()
              << " iterates within 1% of the velocity bound sqrt(T)*M; "
                 "Euler-Lagrange residuals are unreliable there\n";
  }
  if (cfg.learner.type == "omd" && !game.problem().ConvexCost() && !quiet) {
    std::cerr << "warning: mirror descent on a non-convex coupling is "
                 "outside the convergence theory\n";
  }
  return artifacts;
}

}  // namespace

std::string TraceToCsv(const RunTrace& trace, bool include_timing) {
  std::string csv = "n,phi,psi,alpha,d1_ref,d1_step,max_grad,ms\n";
  for (const RoundRecord& row : trace.rows) {
    csv += std::to_string(row.n);
    csv += ',';
    csv += FormatDouble(row.phi);
    csv += ',';
    csv += FormatDouble(row.psi);
    csv += ',';
    csv += FormatDouble(row.alpha);
    csv += ',';
    csv += FormatDouble(row.d1_ref);
    csv += ',';
    csv += FormatDouble(row.d1_step);
    csv += ',';
    csv += FormatDouble(row.max_grad);
    csv += ',';
    csv += include_timing ? FormatDouble(row.ms) : std::string("0");
    csv += '\n';
  }
  return csv;
}

ExperimentOutcome RunExperiment(const ExperimentConfig& cfg, bool quiet) {
  ExperimentOutcome outcome;
  std::filesystem::path out_dir(cfg.out);
  std::filesystem::create_directories(out_dir);

  // The echo alone reproduces the run.
  WriteFile(out_dir / "config.json", SerializeConfig(cfg));

  RunArtifacts artifacts;
  try {
    artifacts = cfg.game == "population" ? RunPopulation(cfg, quiet)
                                         : RunMfg(cfg, quiet);
  } catch (const std::exception& e) {
    artifacts.error = e.what();
  }

  WriteFile(out_dir / "trace.csv", TraceToCsv(artifacts.trace, cfg.timing));
  WriteFile(out_dir / "plot_trace.py", kPlotScript);
  if (!artifacts.final_distribution.is_null()) {
    WriteFile(out_dir / "final_distribution.json",
              artifacts.final_distribution.dump(2) + "\n");
  }

  nlohmann::json summary;
  const auto& rows = artifacts.trace.rows;
  summary["rounds"] = rows.size();
  summary["converged"] = artifacts.converged;
  summary["final_phi"] = rows.empty() ? 0.0 : rows.back().phi;
  summary["final_psi"] = rows.empty() ? 0.0 : rows.back().psi;
  summary["final_d1_ref"] = rows.empty() ? 0.0 : rows.back().d1_ref;
  summary["wall_ms"] = artifacts.total_ms;
  summary["seed"] = cfg.seed;
  summary["beta_outside_theorem"] =
      cfg.learner.type == "omd" && cfg.learner.beta_exponent != 1.0;
  {
    // Distribution-level Nash test: the final exploitability (phi of the
    // belief for FP, of the play for OMD) against the stopping tolerance.
    double tol = std::max(cfg.learner.stop.phi_tol, 1e-9);
    summary["equilibrium_check"] =
        nlohmann::json{{"tolerance", tol},
                       {"passed", !rows.empty() && rows.back().phi < tol}};
  }
  for (auto& [key, value] : artifacts.extras.items()) summary[key] = value;
  if (!artifacts.error.empty()) summary["error"] = artifacts.error;
  WriteFile(out_dir / "summary.json", summary.dump(2) + "\n");

  if (!quiet) {
    std::cerr << "wrote " << (out_dir / "trace.csv").string() << " ("
              << rows.size() << " rounds, converged="
              << (artifacts.converged ? "true" : "false") << ")\n";
    if (!artifacts.error.empty()) {
      std::cerr << "error: " << artifacts.error << "\n";
    }
  }

  outcome.summary = std::move(summary);
  outcome.exit_code = !artifacts.error.empty() ? 1
                      : artifacts.converged    ? 0
                                               : 2;
  return outcome;
}

}  // namespace fieldplay
