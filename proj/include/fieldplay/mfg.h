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

#ifndef FIELDPLAY_MFG_H_
#define FIELDPLAY_MFG_H_

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fieldplay/coupling.h"
#include "fieldplay/game.h"
#include "fieldplay/measure.h"
#include "fieldplay/trajectory.h"

namespace fieldplay {

// First-order mean field game data: grid, Lagrangian, couplings and the
// initial distribution of players. Action sets are S_{x,M}: paths starting
// at x with discrete L^2 velocity norm at most sqrt(T)*M.
struct MfgConfig {
  int d = 1;
  double T = 1.0;
  int nt = 32;
  double M = 4.0;
  std::string lagrangian = "quadratic";  // L(x,v) = 0.5*w*|v|^2
  double lagrangian_weight = 1.0;
  CouplingSpec f;
  CouplingSpec g;
  std::string m0_kind = "uniform";  // uniform | gaussian (quantiles in d=1)
  double m0_radius = 1.0;
  double m0_sigma = 0.5;

  double dt() const { return T / nt; }
  double VelocityBound() const { return std::sqrt(T) * M; }
  void Validate() const;
};

// Config with instantiated couplings.
class MfgProblem {
 public:
  static MfgProblem Build(const MfgConfig& config);

  const MfgConfig& config() const { return config_; }
  const Coupling& f() const { return *f_; }
  const Coupling& g() const { return *g_; }
  double dt() const { return config_.dt(); }
  int nt() const { return config_.nt; }
  int dim() const { return config_.d; }
  bool ConvexCost() const { return f_->ConvexInX() && g_->ConvexInX(); }
  bool MonotoneCost() const { return f_->Monotone() && g_->Monotone(); }

  double LagrangianWeight() const { return config_.lagrangian_weight; }

 private:
  MfgConfig config_;
  std::shared_ptr<const Coupling> f_, g_;
};

// Snapshot of a trajectory measure with cached time marginals: per grid time
// the atom positions, their weights and the weighted mean. Built once per
// round, read-only afterwards. A means-only snapshot drops the atom lists;
// it serves couplings with NeedsMarginalAtoms() == false and lets a running
// average over thousands of rounds update in O(K) per round.
class FlowMeasure : public GameInstance<Trajectory>::Prepared {
 public:
  FlowMeasure(const DiscreteMeasure<Trajectory>& source, int nt, double dt);

  // (1-t)*previous + t*increment, keeping only the marginal means.
  static std::unique_ptr<FlowMeasure> MixedMeans(
      const FlowMeasure& previous, const DiscreteMeasure<Trajectory>& increment,
      double t, int nt, double dt);

  int TimeSteps() const { return nt_; }
  bool MeansOnly() const { return means_only_; }
  MarginalView Marginal(int k) const;

  // e_{t_k} # eta as a measure on R^d (Euclidean ground metric).
  DiscreteMeasure<Eigen::VectorXd> MarginalAt(int k) const;

 private:
  FlowMeasure() = default;

  int nt_ = 0;
  bool means_only_ = false;
  std::vector<Eigen::MatrixXd> positions_;  // (nt+1) matrices, atoms x d
  std::vector<Eigen::VectorXd> means_;
  std::vector<double> weights_;
};

// Shared Euclidean metric handle for R^d point measures.
MetricPtrOf<Eigen::VectorXd> EuclideanMetric();

// J(gamma, eta): left-endpoint rectangle quadrature of the running cost plus
// the terminal coupling.
double CostJ(const Trajectory& gamma, const FlowMeasure& eta,
             const MfgProblem& problem);

// H^1 representer of D_gamma J, discretized with the same rectangle rule as
// CostJ, so central finite differences of CostJ match <GradJ, z>_{H^1} at the
// discrete level. Not constrained to S_{x,M}.
Trajectory GradJ(const Trajectory& gamma, const FlowMeasure& eta,
                 const MfgProblem& problem);

// Q_{A_i} for h = 0.5*|.|^2: rescale the velocity into the L^2 ball and pin
// the start point. Exactly idempotent.
Trajectory MirrorProjectTraj(const Trajectory& y, const Eigen::VectorXd& x0,
                             const MfgProblem& problem);

struct SolverParams {
  double tol = 1e-8;     // gradient-mapping residual in H^1 norm
  int max_iters = 5000;
};

struct BestResponseStats {
  int iterations = 0;
  double residual = 0.0;
  bool velocity_bound_active = false;
};

class BestResponseError : public std::runtime_error {
 public:
  BestResponseError(const std::string& what, Trajectory best, double residual)
      : std::runtime_error(what), best_iterate(std::move(best)),
        residual(residual) {}
  Trajectory best_iterate;
  double residual;
};

// Projected-gradient minimizer of CostJ over S_{x0,M}. Throws
// BestResponseError with the best iterate when the iteration cap is reached.
Trajectory BestResponseTraj(const Eigen::VectorXd& x0, const FlowMeasure& eta,
                            const MfgProblem& problem,
                            const SolverParams& params = {},
                            const Trajectory* warm_start = nullptr,
                            BestResponseStats* stats = nullptr);

struct ElResidual {
  double interior_max = 0.0;  // defect of d/dt L_v = L_x + f_x at grid times
  double terminal = 0.0;      // defect of L_v(T) = -g_x
  bool velocity_bound_active = false;

  double total() const { return interior_max + terminal; }
};

ElResidual EulerLagrangeResidual(const Trajectory& gamma,
                                 const FlowMeasure& eta,
                                 const MfgProblem& problem);

// The MFG as an anonymous game: players are the K atoms of the discretized
// initial distribution, actions are trajectories, the ground metric is the
// discretized sup distance. Exposes gradients and the mirror projection, so
// both learning loops apply.
class MfgGame : public GameInstance<Trajectory> {
 public:
  MfgGame(const MfgConfig& config, int players, std::uint64_t seed,
          SolverParams solver = {});

  int NumPlayers() const override { return static_cast<int>(starts_.size()); }
  double PlayerWeight(int) const override {
    return 1.0 / static_cast<double>(starts_.size());
  }
  MetricPtrOf<Trajectory> ActionMetric() const override { return metric_; }

  std::unique_ptr<Prepared> Prepare(
      const DiscreteMeasure<Trajectory>& eta) const override;
  std::unique_ptr<Prepared> PrepareMix(
      const Prepared& previous, const DiscreteMeasure<Trajectory>& increment,
      double t) const override;
  double Cost(const Trajectory& action, const Prepared& eta) const override;
  Trajectory BestResponse(int player, const Prepared& eta,
                          const Trajectory* warm_start) const override;
  bool InActionSet(int player, const Trajectory& action,
                   double tol) const override;
  Trajectory DefaultAction(int player) const override;
  bool ReliableBestResponse() const override { return problem_.ConvexCost(); }
  bool MonotoneCost() const override { return problem_.MonotoneCost(); }

  bool HasSubgradient() const override { return true; }
  Trajectory Subgradient(const Trajectory& action,
                         const Prepared& eta) const override;
  Trajectory MirrorProject(int player, const Trajectory& dual) const override;
  Trajectory DualStep(const Trajectory& phi, const Trajectory& y,
                      double beta) const override;
  double WNorm(const Trajectory& a) const override { return H1Norm(a); }
  double WDistance(const Trajectory& a, const Trajectory& b) const override {
    return H1Distance(a, b);
  }
  double DualPairing(const Trajectory& y, const Trajectory& a,
                     const Trajectory& b) const override {
    return H1Dot(y, a - b);
  }

  const MfgProblem& problem() const { return problem_; }
  const Eigen::VectorXd& Start(int player) const { return starts_[player]; }
  const SolverParams& solver() const { return solver_; }

  // Rounds in which some converged iterate sat within 1% of the velocity
  // bound; a nonzero count contaminates Euler-Lagrange residuals and the
  // assumptions behind the convergence guarantees.
  long VelocityBoundHits() const { return near_bound_hits_.load(); }

 private:
  MfgProblem problem_;
  std::vector<Eigen::VectorXd> starts_;
  MetricPtrOf<Trajectory> metric_;
  SolverParams solver_;
  mutable std::atomic<long> near_bound_hits_{0};
};

// Deterministic discretization of m0: quantile grid in d=1, seeded i.i.d.
// samples otherwise.
std::vector<Eigen::VectorXd> DiscretizeM0(const MfgConfig& config, int players,
                                          std::uint64_t seed);

}  // namespace fieldplay

#endif  // FIELDPLAY_MFG_H_
