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

#ifndef FIELDPLAY_COUPLING_H_
#define FIELDPLAY_COUPLING_H_

#include <memory>
#include <span>
#include <string>

#include <Eigen/Core>

#include "fieldplay/common.h"

namespace fieldplay {

// View of one time marginal of a flow measure.
struct MarginalView {
  const Eigen::MatrixXd* points = nullptr;  // atoms x d
  std::span<const double> weights;
  const Eigen::VectorXd* mean = nullptr;    // cached weighted mean
};

// Interaction cost f(x, m) (or g) between a position and a distribution of
// positions, with its x-gradient. Implementations must be smooth in x.
class Coupling {
 public:
  virtual ~Coupling() = default;
  virtual double Value(const Eigen::VectorXd& x, const MarginalView& m) const = 0;
  virtual Eigen::VectorXd GradX(const Eigen::VectorXd& x,
                                const MarginalView& m) const = 0;
  virtual bool Monotone() const = 0;
  virtual bool ConvexInX() const = 0;
  virtual std::string Name() const = 0;
  virtual bool IsZero() const { return false; }
  // Couplings that read only the marginal mean admit snapshots without the
  // full atom lists, which keeps long running-average beliefs cheap.
  virtual bool NeedsMarginalAtoms() const { return true; }
  // Uniform bound on the spectral norm of the x-Hessian, used to pick a
  // provably safe projected-gradient step.
  virtual double CurvatureBound() const = 0;
};

// No interaction.
std::unique_ptr<Coupling> MakeZeroCoupling();

// weight * integral of exp(-|x-y|^2 / (2 sigma^2)) dm(y). The Gaussian
// kernel is positive definite, so the coupling is monotone; it is not
// globally convex in x.
std::unique_ptr<Coupling> MakeGaussianKernelCoupling(double weight,
                                                     double sigma);

// Sign-flipped Gaussian kernel: strictly anti-monotone whenever the
// marginals differ. Kept as the falsifier for monotonicity audits.
std::unique_ptr<Coupling> MakeNegGaussianKernelCoupling(double weight,
                                                        double sigma);

// weight * integral of 0.5*|x-y|^2 dm(y). Convex in x, but attractive
// through the marginal mean: the monotonicity form evaluates to
// -weight*|mean(m)-mean(m')|^2, so it is not a monotone coupling.
std::unique_ptr<Coupling> MakeQuadraticKernelCoupling(double weight);

// weight * <x, mean(m)>. Linear (hence convex) in x and monotone: the
// monotonicity form is weight*|mean(m)-mean(m')|^2. The convex-and-monotone
// builtin used by the mirror-descent experiments.
std::unique_ptr<Coupling> MakeLinearMeanCoupling(double weight);

// weight * 0.5*|x - target|^2, independent of m (monotone with value 0).
std::unique_ptr<Coupling> MakeTargetQuadraticCoupling(
    double weight, const Eigen::VectorXd& target);

struct CouplingSpec {
  std::string name = "zero";
  double weight = 1.0;
  double sigma = 0.5;
  std::vector<double> target;  // for target-quadratic

  std::unique_ptr<Coupling> Build(int dim) const;
};

}  // namespace fieldplay

#endif  // FIELDPLAY_COUPLING_H_
