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

#include "fieldplay/coupling.h"

#include <cmath>

namespace fieldplay {
namespace {

class ZeroCoupling : public Coupling {
 public:
  double Value(const Eigen::VectorXd&, const MarginalView&) const override {
    return 0.0;
  }
  Eigen::VectorXd GradX(const Eigen::VectorXd& x,
                        const MarginalView&) const override {
    return Eigen::VectorXd::Zero(x.size());
  }
  bool Monotone() const override { return true; }
  bool ConvexInX() const override { return true; }
  std::string Name() const override { return "zero"; }
  bool IsZero() const override { return true; }
  bool NeedsMarginalAtoms() const override { return false; }
  double CurvatureBound() const override { return 0.0; }
};

class GaussianKernelCoupling : public Coupling {
 public:
  GaussianKernelCoupling(double weight, double sigma, double sign)
      : weight_(weight), sigma_(sigma), sign_(sign) {
    FIELDPLAY_CHECK_ARG(sigma > 0.0, "gaussian kernel sigma must be > 0");
  }

  double Value(const Eigen::VectorXd& x, const MarginalView& m) const override {
    FIELDPLAY_CHECK(m.points != nullptr, "kernel coupling needs marginal atoms");
    const double inv = 1.0 / (2.0 * sigma_ * sigma_);
    double total = 0.0;
    for (int i = 0; i < m.points->rows(); ++i) {
      double d2 = (x.transpose() - m.points->row(i)).squaredNorm();
      total += m.weights[i] * std::exp(-d2 * inv);
    }
    return sign_ * weight_ * total;
  }

  Eigen::VectorXd GradX(const Eigen::VectorXd& x,
                        const MarginalView& m) const override {
    FIELDPLAY_CHECK(m.points != nullptr, "kernel coupling needs marginal atoms");
    const double inv = 1.0 / (2.0 * sigma_ * sigma_);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
    for (int i = 0; i < m.points->rows(); ++i) {
      Eigen::VectorXd diff = x - m.points->row(i).transpose();
      grad += m.weights[i] * std::exp(-diff.squaredNorm() * inv) *
              (-2.0 * inv) * diff;
    }
    return sign_ * weight_ * grad;
  }

  bool Monotone() const override { return sign_ > 0.0; }
  bool ConvexInX() const override { return false; }
  std::string Name() const override {
    return sign_ > 0.0 ? "gaussian" : "neg-gaussian";
  }
  // |d^2/dx^2 exp(-|x|^2/2s^2)| is maximized at the origin with value 1/s^2.
  double CurvatureBound() const override {
    return std::abs(weight_) / (sigma_ * sigma_);
  }

 private:
  double weight_, sigma_, sign_;
};

class QuadraticKernelCoupling : public Coupling {
 public:
  explicit QuadraticKernelCoupling(double weight) : weight_(weight) {}

  double Value(const Eigen::VectorXd& x, const MarginalView& m) const override {
    FIELDPLAY_CHECK(m.points != nullptr, "kernel coupling needs marginal atoms");
    double total = 0.0;
    for (int i = 0; i < m.points->rows(); ++i) {
      total += m.weights[i] *
               0.5 * (x.transpose() - m.points->row(i)).squaredNorm();
    }
    return weight_ * total;
  }

  Eigen::VectorXd GradX(const Eigen::VectorXd& x,
                        const MarginalView& m) const override {
    // grad = x - mean(m) since the weights sum to one.
    return weight_ * (x - *m.mean);
  }

  bool Monotone() const override { return false; }
  bool ConvexInX() const override { return true; }
  std::string Name() const override { return "quadratic"; }
  double CurvatureBound() const override { return std::abs(weight_); }

 private:
  double weight_;
};

class LinearMeanCoupling : public Coupling {
 public:
  explicit LinearMeanCoupling(double weight) : weight_(weight) {}

  double Value(const Eigen::VectorXd& x, const MarginalView& m) const override {
    return weight_ * x.dot(*m.mean);
  }
  Eigen::VectorXd GradX(const Eigen::VectorXd&,
                        const MarginalView& m) const override {
    return weight_ * *m.mean;
  }
  bool Monotone() const override { return true; }
  bool ConvexInX() const override { return true; }
  std::string Name() const override { return "linear-mean"; }
  bool NeedsMarginalAtoms() const override { return false; }
  double CurvatureBound() const override { return 0.0; }

 private:
  double weight_;
};

class TargetQuadraticCoupling : public Coupling {
 public:
  TargetQuadraticCoupling(double weight, Eigen::VectorXd target)
      : weight_(weight), target_(std::move(target)) {}

  double Value(const Eigen::VectorXd& x, const MarginalView&) const override {
    return weight_ * 0.5 * (x - target_).squaredNorm();
  }
  Eigen::VectorXd GradX(const Eigen::VectorXd& x,
                        const MarginalView&) const override {
    return weight_ * (x - target_);
  }
  bool Monotone() const override { return true; }
  bool ConvexInX() const override { return true; }
  std::string Name() const override { return "target-quadratic"; }
  bool NeedsMarginalAtoms() const override { return false; }
  double CurvatureBound() const override { return std::abs(weight_); }

 private:
  double weight_;
  Eigen::VectorXd target_;
};

}  // namespace

std::unique_ptr<Coupling> MakeZeroCoupling() {
  return std::make_unique<ZeroCoupling>();
}

std::unique_ptr<Coupling> MakeGaussianKernelCoupling(double weight,
                                                     double sigma) {
  return std::make_unique<GaussianKernelCoupling>(weight, sigma, 1.0);
}

std::unique_ptr<Coupling> MakeNegGaussianKernelCoupling(double weight,
                                                        double sigma) {
  return std::make_unique<GaussianKernelCoupling>(weight, sigma, -1.0);
}

std::unique_ptr<Coupling> MakeQuadraticKernelCoupling(double weight) {
  return std::make_unique<QuadraticKernelCoupling>(weight);
}

std::unique_ptr<Coupling> MakeLinearMeanCoupling(double weight) {
  return std::make_unique<LinearMeanCoupling>(weight);
}

std::unique_ptr<Coupling> MakeTargetQuadraticCoupling(
    double weight, const Eigen::VectorXd& target) {
  return std::make_unique<TargetQuadraticCoupling>(weight, target);
}

std::unique_ptr<Coupling> CouplingSpec::Build(int dim) const {
  FIELDPLAY_CHECK_ARG(IsFinite(weight), "coupling weight must be finite");
  if (name == "zero") return MakeZeroCoupling();
  if (name == "gaussian") return MakeGaussianKernelCoupling(weight, sigma);
  if (name == "neg-gaussian") {
    return MakeNegGaussianKernelCoupling(weight, sigma);
  }
  if (name == "quadratic") return MakeQuadraticKernelCoupling(weight);
  if (name == "linear-mean") return MakeLinearMeanCoupling(weight);
  if (name == "target-quadratic") {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(dim);
    FIELDPLAY_CHECK_ARG(target.empty() || static_cast<int>(target.size()) == dim,
                        "coupling target needs ", dim, " entries");
    for (std::size_t c = 0; c < target.size(); ++c) t[c] = target[c];
    return MakeTargetQuadraticCoupling(weight, t);
  }
  FIELDPLAY_CHECK_ARG(false, "unknown coupling builtin '", name, "'");
  return nullptr;
}

}  // namespace fieldplay
