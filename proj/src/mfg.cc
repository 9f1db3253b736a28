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

#include "fieldplay/mfg.h"

#include <algorithm>
#include <cmath>

#include "fieldplay/rng.h"

namespace fieldplay {

void MfgConfig::Validate() const {
  FIELDPLAY_CHECK_ARG(d >= 1, "d must be >= 1");
  FIELDPLAY_CHECK_ARG(T > 0.0, "T must be > 0");
  FIELDPLAY_CHECK_ARG(nt >= 1, "N_t must be >= 1");
  FIELDPLAY_CHECK_ARG(M > 0.0, "M must be > 0");
  FIELDPLAY_CHECK_ARG(lagrangian == "quadratic",
                      "unknown lagrangian '", lagrangian, "'");
  FIELDPLAY_CHECK_ARG(lagrangian_weight > 0.0,
                      "lagrangian weight must be > 0");
  FIELDPLAY_CHECK_ARG(m0_kind == "uniform" || m0_kind == "gaussian",
                      "unknown m0 kind '", m0_kind, "'");
  FIELDPLAY_CHECK_ARG(m0_radius > 0.0, "m0 radius must be > 0");
  FIELDPLAY_CHECK_ARG(m0_sigma > 0.0, "m0 sigma must be > 0");
}

MfgProblem MfgProblem::Build(const MfgConfig& config) {
  config.Validate();
  MfgProblem problem;
  problem.config_ = config;
  problem.f_ = config.f.Build(config.d);
  problem.g_ = config.g.Build(config.d);
  return problem;
}

FlowMeasure::FlowMeasure(const DiscreteMeasure<Trajectory>& source, int nt,
                         double dt)
    : nt_(nt) {
  this->source = &source;
  const int atoms = source.size();
  FIELDPLAY_CHECK_ARG(atoms >= 1, "flow measure without atoms");
  weights_.resize(atoms);
  positions_.assign(nt + 1, Eigen::MatrixXd());
  means_.assign(nt + 1, Eigen::VectorXd());

  const int dim = source.atoms()[0].point.Dim();
  for (int k = 0; k <= nt; ++k) positions_[k].resize(atoms, dim);

  for (int i = 0; i < atoms; ++i) {
    const auto& atom = source.atoms()[i];
    const Trajectory& traj = atom.point;
    FIELDPLAY_CHECK_ARG(traj.Steps() == nt && traj.Dim() == dim &&
                            std::abs(traj.dt - dt) <= 1e-15,
                        "trajectory grid mismatch in flow measure");
    weights_[i] = atom.weight;
    Eigen::VectorXd x = traj.x0;
    positions_[0].row(i) = x.transpose();
    for (int k = 0; k < nt; ++k) {
      x += dt * traj.vel.row(k).transpose();
      positions_[k + 1].row(i) = x.transpose();
    }
  }
  for (int k = 0; k <= nt; ++k) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < atoms; ++i) {
      mean += weights_[i] * positions_[k].row(i).transpose();
    }
    means_[k] = mean;
  }
}

std::unique_ptr<FlowMeasure> FlowMeasure::MixedMeans(
    const FlowMeasure& previous, const DiscreteMeasure<Trajectory>& increment,
    double t, int nt, double dt) {
  FIELDPLAY_CHECK_ARG(previous.nt_ == nt, "flow measure grid mismatch");
  auto out = std::unique_ptr<FlowMeasure>(new FlowMeasure());
  out->nt_ = nt;
  out->means_only_ = true;
  out->means_.assign(nt + 1, Eigen::VectorXd());

  const int dim = increment.atoms()[0].point.Dim();
  std::vector<Eigen::VectorXd> inc_means(nt + 1,
                                         Eigen::VectorXd::Zero(dim));
  for (const auto& atom : increment.atoms()) {
    const Trajectory& traj = atom.point;
    FIELDPLAY_CHECK_ARG(traj.Steps() == nt && traj.Dim() == dim &&
                            std::abs(traj.dt - dt) <= 1e-15,
                        "trajectory grid mismatch in flow measure");
    Eigen::VectorXd x = traj.x0;
    inc_means[0] += atom.weight * x;
    for (int k = 0; k < nt; ++k) {
      x += dt * traj.vel.row(k).transpose();
      inc_means[k + 1] += atom.weight * x;
    }
  }
  for (int k = 0; k <= nt; ++k) {
    out->means_[k] = (1.0 - t) * previous.means_[k] + t * inc_means[k];
  }
  return out;
}

MarginalView FlowMeasure::Marginal(int k) const {
  FIELDPLAY_CHECK_ARG(k >= 0 && k <= nt_, "marginal index ", k,
                      " out of range");
  MarginalView view;
  view.points = means_only_ ? nullptr : &positions_[k];
  if (!means_only_) view.weights = weights_;
  view.mean = &means_[k];
  return view;
}

MetricPtrOf<Eigen::VectorXd> EuclideanMetric() {
  static const MetricPtrOf<Eigen::VectorXd> metric =
      MakeMetric<Eigen::VectorXd>(
          [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return (a - b).norm();
          });
  return metric;
}

DiscreteMeasure<Eigen::VectorXd> FlowMeasure::MarginalAt(int k) const {
  FIELDPLAY_CHECK_ARG(!means_only_,
                      "means-only flow snapshot has no marginal atoms");
  MarginalView view = Marginal(k);
  std::vector<DiscreteMeasure<Eigen::VectorXd>::Atom> atoms;
  atoms.reserve(view.points->rows());
  for (int i = 0; i < view.points->rows(); ++i) {
    atoms.push_back({view.points->row(i).transpose(), view.weights[i]});
  }
  return DiscreteMeasure<Eigen::VectorXd>::FromAtoms(std::move(atoms),
                                                     EuclideanMetric());
}

namespace {

void RequireGrid(const Trajectory& gamma, const MfgProblem& problem) {
  FIELDPLAY_CHECK_ARG(
      gamma.Steps() == problem.nt() && gamma.Dim() == problem.dim() &&
          std::abs(gamma.dt - problem.dt()) <= 1e-15,
      "trajectory grid mismatch");
}

}  // namespace

double CostJ(const Trajectory& gamma, const FlowMeasure& eta,
             const MfgProblem& problem) {
  RequireGrid(gamma, problem);
  FIELDPLAY_CHECK_ARG(eta.TimeSteps() == problem.nt(),
                      "flow measure grid mismatch");
  const double dt = problem.dt();
  const double wl = problem.LagrangianWeight();
  double total = 0.0;
  Eigen::VectorXd x = gamma.x0;
  for (int k = 0; k < problem.nt(); ++k) {
    double running = 0.5 * wl * gamma.vel.row(k).squaredNorm();
    if (!problem.f().IsZero()) {
      running += problem.f().Value(x, eta.Marginal(k));
    }
    total += dt * running;
    x += dt * gamma.vel.row(k).transpose();
  }
  if (!problem.g().IsZero()) {
    total += problem.g().Value(x, eta.Marginal(problem.nt()));
  }
  FIELDPLAY_CHECK_ARG(IsFinite(total), "non-finite cost value");
  return total;
}

Trajectory GradJ(const Trajectory& gamma, const FlowMeasure& eta,
                 const MfgProblem& problem) {
  RequireGrid(gamma, problem);
  const int nt = problem.nt();
  const int dim = problem.dim();
  const double dt = problem.dt();
  const double wl = problem.LagrangianWeight();

  // Node sensitivities w_k = dJ/d gamma(t_k): dt*(L_x + f_x) at interior
  // quadrature nodes, plus g_x at the terminal node. For the quadratic
  // Lagrangian L_x = 0.
  Eigen::MatrixXd node_grad = Eigen::MatrixXd::Zero(nt + 1, dim);
  Eigen::VectorXd x = gamma.x0;
  for (int k = 0; k < nt; ++k) {
    if (!problem.f().IsZero()) {
      node_grad.row(k) =
          dt * problem.f().GradX(x, eta.Marginal(k)).transpose();
    }
    x += dt * gamma.vel.row(k).transpose();
  }
  if (!problem.g().IsZero()) {
    node_grad.row(nt) = problem.g().GradX(x, eta.Marginal(nt)).transpose();
  }

  // Riesz representer in the discrete H^1 inner product
  // <a,b> = <a(0),b(0)> + dt * sum_k <a_k, b_k>:
  //   repr.x0    = sum_k w_k
  //   repr.vel_j = L_v(gamma_j, v_j) + sum_{k>j} w_k
  Trajectory repr;
  repr.dt = dt;
  repr.vel.resize(nt, dim);
  Eigen::VectorXd tail = Eigen::VectorXd::Zero(dim);
  for (int j = nt - 1; j >= 0; --j) {
    tail += node_grad.row(j + 1).transpose();
    repr.vel.row(j) = wl * gamma.vel.row(j) + tail.transpose();
  }
  repr.x0 = tail + node_grad.row(0).transpose();
  return repr;
}

Trajectory MirrorProjectTraj(const Trajectory& y, const Eigen::VectorXd& x0,
                             const MfgProblem& problem) {
  RequireGrid(y, problem);
  const double bound = problem.config().VelocityBound();
  Trajectory out = y;
  out.x0 = x0;
  double norm = out.VelocityL2();
  if (norm > bound) {
    out.vel *= bound / norm;
    // Nudge against floating-point overshoot so that projecting twice
    // returns bit-identical output.
    while (out.VelocityL2() > bound) {
      out.vel *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    }
  }
  return out;
}

// Uniform curvature bound of J(., eta) in the H^1 metric: the Lagrangian
// contributes exactly w_L, the running coupling at most f'' * T^2/2 (nodes
// starting at zero satisfy the discrete Poincare bound sum dt |z_k|^2 <=
// T^2/2 |z_dot|^2) and the terminal coupling at most g'' * T.
double CostCurvatureBound(const MfgProblem& problem) {
  const double T = problem.config().T;
  return problem.LagrangianWeight() +
         problem.f().CurvatureBound() * T * T / 2.0 +
         problem.g().CurvatureBound() * T;
}

Trajectory BestResponseTraj(const Eigen::VectorXd& x0, const FlowMeasure& eta,
                            const MfgProblem& problem,
                            const SolverParams& params,
                            const Trajectory* warm_start,
                            BestResponseStats* stats) {
  Trajectory gamma = warm_start != nullptr
                         ? MirrorProjectTraj(*warm_start, x0, problem)
                         : Trajectory::Constant(x0, problem.nt(), problem.dt());
  // Fixed step below the inverse curvature bound: projected gradient then
  // descends monotonically and the gradient mapping contracts to rounding
  // level, without cost-value comparisons that lose resolution near the
  // minimum.
  const double step = 1.0 / CostCurvatureBound(problem);
  double residual = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < params.max_iters; ++iter) {
    Trajectory grad = GradJ(gamma, eta, problem);
    Trajectory mapped = MirrorProjectTraj(gamma - grad, x0, problem);
    residual = H1Distance(gamma, mapped);
    if (residual <= params.tol) {
      if (stats != nullptr) {
        stats->iterations = iter;
        stats->residual = residual;
        stats->velocity_bound_active =
            gamma.VelocityL2() >= 0.99 * problem.config().VelocityBound();
      }
      return gamma;
    }
    gamma.vel -= step * grad.vel;
    gamma = MirrorProjectTraj(gamma, x0, problem);
  }

  if (stats != nullptr) {
    stats->iterations = params.max_iters;
    stats->residual = residual;
  }
  throw BestResponseError(
      internal::StrCat("fieldplay: best response hit the iteration cap (",
                       params.max_iters, " iters, residual ", residual, ")"),
      std::move(gamma), residual);
}

ElResidual EulerLagrangeResidual(const Trajectory& gamma,
                                 const FlowMeasure& eta,
                                 const MfgProblem& problem) {
  RequireGrid(gamma, problem);
  const int nt = problem.nt();
  const double dt = problem.dt();
  const double wl = problem.LagrangianWeight();

  ElResidual res;
  res.velocity_bound_active =
      gamma.VelocityL2() >= 0.99 * problem.config().VelocityBound();

  Eigen::MatrixXd nodes = gamma.Nodes();
  // Discrete momentum p_j = L_v(gamma_j, v_j) on each interval.
  for (int k = 1; k < nt; ++k) {
    Eigen::VectorXd lhs =
        wl * (gamma.vel.row(k) - gamma.vel.row(k - 1)).transpose() / dt;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(problem.dim());
    if (!problem.f().IsZero()) {
      rhs = problem.f().GradX(nodes.row(k).transpose(), eta.Marginal(k));
    }
    res.interior_max = std::max(res.interior_max, (lhs - rhs).norm());
  }
  Eigen::VectorXd terminal =
      wl * gamma.vel.row(nt - 1).transpose() +
      problem.g().GradX(nodes.row(nt).transpose(), eta.Marginal(nt));
  res.terminal = terminal.norm();
  return res;
}

std::vector<Eigen::VectorXd> DiscretizeM0(const MfgConfig& config, int players,
                                          std::uint64_t seed) {
  config.Validate();
  FIELDPLAY_CHECK_ARG(players >= 1, "K must be >= 1");
  std::vector<Eigen::VectorXd> starts;
  starts.reserve(players);
  const double radius = config.m0_radius;

  if (config.d == 1) {
    // Deterministic quantile grid.
    for (int i = 0; i < players; ++i) {
      double q = (i + 0.5) / players;
      double x = 0.0;
      if (config.m0_kind == "uniform") {
        x = -radius + 2.0 * radius * q;
      } else {
        // Quantile of a normal truncated to [-radius, radius] by bisection.
        auto cdf = [&](double t) {
          return 0.5 * (1.0 + std::erf(t / (config.m0_sigma * std::sqrt(2.0))));
        };
        double lo_q = cdf(-radius), hi_q = cdf(radius);
        double target = lo_q + q * (hi_q - lo_q);
        double lo = -radius, hi = radius;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (lo + hi);
          (cdf(mid) < target ? lo : hi) = mid;
        }
        x = 0.5 * (lo + hi);
      }
      Eigen::VectorXd point(1);
      point[0] = x;
      starts.push_back(std::move(point));
    }
    return starts;
  }

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < players; ++i) {
    Eigen::VectorXd point(config.d);
    if (config.m0_kind == "uniform") {
      // Rejection sampling from the cube into the ball.
      while (true) {
        for (int c = 0; c < config.d; ++c) {
          point[c] = rng.Uniform(-radius, radius);
        }
        if (point.norm() <= radius) break;
      }
    } else {
      for (int c = 0; c < config.d; ++c) {
        point[c] = config.m0_sigma * rng.NextGaussian();
      }
      double norm = point.norm();
      if (norm > radius) point *= radius / norm;
    }
    starts.push_back(std::move(point));
  }
  return starts;
}

namespace {

MetricPtrOf<Trajectory> SupTrajectoryMetric() {
  static const MetricPtrOf<Trajectory> metric = MakeMetric<Trajectory>(
      [](const Trajectory& a, const Trajectory& b) {
        return SupDistance(a, b);
      });
  return metric;
}

}  // namespace

MfgGame::MfgGame(const MfgConfig& config, int players, std::uint64_t seed,
                 SolverParams solver)
    : problem_(MfgProblem::Build(config)),
      starts_(DiscretizeM0(config, players, seed)),
      metric_(SupTrajectoryMetric()),
      solver_(solver) {}

std::unique_ptr<GameInstance<Trajectory>::Prepared> MfgGame::Prepare(
    const DiscreteMeasure<Trajectory>& eta) const {
  return std::make_unique<FlowMeasure>(eta, problem_.nt(), problem_.dt());
}

std::unique_ptr<GameInstance<Trajectory>::Prepared> MfgGame::PrepareMix(
    const Prepared& previous, const DiscreteMeasure<Trajectory>& increment,
    double t) const {
  if (problem_.f().NeedsMarginalAtoms() || problem_.g().NeedsMarginalAtoms()) {
    return nullptr;
  }
  return FlowMeasure::MixedMeans(static_cast<const FlowMeasure&>(previous),
                                 increment, t, problem_.nt(), problem_.dt());
}

double MfgGame::Cost(const Trajectory& action, const Prepared& eta) const {
  return CostJ(action, static_cast<const FlowMeasure&>(eta), problem_);
}

Trajectory MfgGame::BestResponse(int player, const Prepared& eta,
                                 const Trajectory* warm_start) const {
  BestResponseStats stats;
  Trajectory br = BestResponseTraj(starts_[player],
                                   static_cast<const FlowMeasure&>(eta),
                                   problem_, solver_, warm_start, &stats);
  if (stats.velocity_bound_active) near_bound_hits_.fetch_add(1);
  return br;
}

bool MfgGame::InActionSet(int player, const Trajectory& action,
                          double tol) const {
  if (action.Steps() != problem_.nt() || action.Dim() != problem_.dim()) {
    return false;
  }
  if ((action.x0 - starts_[player]).norm() > tol) return false;
  return action.VelocityL2() <= problem_.config().VelocityBound() + tol;
}

Trajectory MfgGame::DefaultAction(int player) const {
  return Trajectory::Constant(starts_[player], problem_.nt(), problem_.dt());
}

Trajectory MfgGame::Subgradient(const Trajectory& action,
                                const Prepared& eta) const {
  return GradJ(action, static_cast<const FlowMeasure&>(eta), problem_);
}

Trajectory MfgGame::MirrorProject(int player, const Trajectory& dual) const {
  Trajectory out = MirrorProjectTraj(dual, starts_[player], problem_);
  if (out.VelocityL2() >= 0.99 * problem_.config().VelocityBound()) {
    near_bound_hits_.fetch_add(1);
  }
  return out;
}

Trajectory MfgGame::DualStep(const Trajectory& phi, const Trajectory& y,
                             double beta) const {
  RequireSameGrid(phi, y);
  Trajectory out = phi;
  out.x0 -= beta * y.x0;
  out.vel -= beta * y.vel;
  return out;
}

}  // namespace fieldplay
