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

#ifndef FIELDPLAY_TRAJECTORY_H_
#define FIELDPLAY_TRAJECTORY_H_

#include <Eigen/Core>

#include <nlohmann/json.hpp>

#include "fieldplay/common.h"

namespace fieldplay {

// Discretized H^1 path on a uniform grid of [0, T]: start point plus
// piecewise-constant velocities, one row per step of length dt. Node k sits
// at x0 + dt * (v_0 + ... + v_{k-1}).
struct Trajectory {
  Eigen::VectorXd x0;   // d
  Eigen::MatrixXd vel;  // steps x d
  double dt = 0.0;

  int Steps() const { return static_cast<int>(vel.rows()); }
  int Dim() const { return static_cast<int>(x0.size()); }

  static Trajectory Constant(const Eigen::VectorXd& x, int steps, double dt) {
    Trajectory t;
    t.x0 = x;
    t.vel = Eigen::MatrixXd::Zero(steps, x.size());
    t.dt = dt;
    return t;
  }

  // (steps+1) x d node positions.
  Eigen::MatrixXd Nodes() const {
    Eigen::MatrixXd nodes(Steps() + 1, Dim());
    nodes.row(0) = x0.transpose();
    for (int k = 0; k < Steps(); ++k) {
      nodes.row(k + 1) = nodes.row(k) + dt * vel.row(k);
    }
    return nodes;
  }

  Eigen::VectorXd Node(int k) const {
    FIELDPLAY_CHECK_ARG(k >= 0 && k <= Steps(), "node index ", k,
                        " out of range");
    Eigen::VectorXd x = x0;
    for (int j = 0; j < k; ++j) x += dt * vel.row(j).transpose();
    return x;
  }

  // Discrete ||gamma_dot||_{L^2} = sqrt(dt * sum_k |v_k|^2).
  double VelocityL2() const { return std::sqrt(dt) * vel.norm(); }

  nlohmann::json ToJson() const {
    nlohmann::json v = nlohmann::json::array();
    for (int k = 0; k < Steps(); ++k) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < Dim(); ++c) row.push_back(vel(k, c));
      v.push_back(std::move(row));
    }
    nlohmann::json x = nlohmann::json::array();
    for (int c = 0; c < Dim(); ++c) x.push_back(x0[c]);
    return nlohmann::json{{"x0", std::move(x)}, {"v", std::move(v)}};
  }
};

inline bool SameGrid(const Trajectory& a, const Trajectory& b) {
  return a.Steps() == b.Steps() && a.Dim() == b.Dim() && a.dt == b.dt;
}

inline void RequireSameGrid(const Trajectory& a, const Trajectory& b) {
  FIELDPLAY_CHECK_ARG(SameGrid(a, b), "trajectory grid mismatch");
}

// <a, b>_{H^1} = <a(0), b(0)> + integral of <a_dot, b_dot>.
inline double H1Dot(const Trajectory& a, const Trajectory& b) {
  RequireSameGrid(a, b);
  return a.x0.dot(b.x0) + a.dt * (a.vel.array() * b.vel.array()).sum();
}

inline double H1Norm(const Trajectory& a) {
  return std::sqrt(a.x0.squaredNorm() + a.dt * a.vel.squaredNorm());
}

inline double H1Distance(const Trajectory& a, const Trajectory& b) {
  RequireSameGrid(a, b);
  return std::sqrt((a.x0 - b.x0).squaredNorm() +
                   a.dt * (a.vel - b.vel).squaredNorm());
}

// Discretized sup metric of C^0([0,T], R^d): max node distance.
inline double SupDistance(const Trajectory& a, const Trajectory& b) {
  RequireSameGrid(a, b);
  Eigen::VectorXd xa = a.x0, xb = b.x0;
  double best = (xa - xb).norm();
  for (int k = 0; k < a.Steps(); ++k) {
    xa += a.dt * a.vel.row(k).transpose();
    xb += b.dt * b.vel.row(k).transpose();
    best = std::max(best, (xa - xb).norm());
  }
  return best;
}

inline Trajectory operator+(const Trajectory& a, const Trajectory& b) {
  RequireSameGrid(a, b);
  Trajectory out = a;
  out.x0 += b.x0;
  out.vel += b.vel;
  return out;
}

inline Trajectory operator-(const Trajectory& a, const Trajectory& b) {
  RequireSameGrid(a, b);
  Trajectory out = a;
  out.x0 -= b.x0;
  out.vel -= b.vel;
  return out;
}

inline Trajectory operator*(double s, const Trajectory& a) {
  Trajectory out = a;
  out.x0 *= s;
  out.vel *= s;
  return out;
}

}  // namespace fieldplay

#endif  // FIELDPLAY_TRAJECTORY_H_
