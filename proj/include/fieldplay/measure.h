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

#ifndef FIELDPLAY_MEASURE_H_
#define FIELDPLAY_MEASURE_H_

#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fieldplay/common.h"
#include "fieldplay/transport.h"

namespace fieldplay {

// Thrown by Integrate when the integrand is non-finite on some atom.
class NonFiniteIntegrandError : public std::runtime_error {
 public:
  NonFiniteIntegrandError(int atom_index, const std::string& what)
      : std::runtime_error(what), atom_index(atom_index) {}
  int atom_index;
};

// Finite-support probability measure over an abstract metric point space.
// Values are immutable after construction; every operation returns a new
// measure. The metric is shared by handle: operations that combine two
// measures require the identical handle.
template <typename Point>
class DiscreteMeasure {
 public:
  struct Atom {
    Point point;
    double weight;
  };
  using MetricFn = std::function<double(const Point&, const Point&)>;
  using MetricPtr = std::shared_ptr<const MetricFn>;

  static constexpr double kDedupTol = 1e-12;
  static constexpr double kPruneTol = 1e-14;
  static constexpr int kDefaultLpCap = 1024;

  // Merges points closer than dedup_tol, drops weights below the prune
  // threshold and renormalizes total mass to one.
  static DiscreteMeasure FromAtoms(std::vector<Atom> atoms, MetricPtr metric,
                                   double dedup_tol = kDedupTol) {
    FIELDPLAY_CHECK_ARG(metric != nullptr, "measure: null metric");
    FIELDPLAY_CHECK_ARG(!atoms.empty(), "measure: needs at least one atom");
    for (const Atom& a : atoms) {
      FIELDPLAY_CHECK_ARG(IsFinite(a.weight) && a.weight > 0.0,
                          "invalid weight");
    }
    DiscreteMeasure out(std::move(metric));
    out.MergeAppend(std::move(atoms), dedup_tol);
    out.PruneAndNormalize();
    return out;
  }

  // Empirical measure of a weighted action profile.
  static DiscreteMeasure Pushforward(
      std::span<const std::pair<Point, double>> profile, MetricPtr metric) {
    FIELDPLAY_CHECK_ARG(!profile.empty(), "empty profile");
    double mass = 0.0;
    for (const auto& [point, weight] : profile) {
      FIELDPLAY_CHECK_ARG(IsFinite(weight) && weight > 0.0, "invalid weight");
      mass += weight;
    }
    FIELDPLAY_CHECK_ARG(std::abs(mass - 1.0) <= 1e-9,
                        "profile weights sum to ", mass, ", expected 1");
    std::vector<Atom> atoms;
    atoms.reserve(profile.size());
    for (const auto& [point, weight] : profile) atoms.push_back({point, weight});
    return FromAtoms(std::move(atoms), std::move(metric));
  }

  // (1-t)*this + t*nu. Atoms of nu within dedup tolerance of an existing
  // atom are merged, so long mixing chains over recurring actions do not
  // accumulate duplicates. The merge scan is skipped once the support
  // exceeds kMixDedupCap: large supports of continuous actions repeat
  // essentially never, and the scan would dominate the mixing cost.
  static constexpr int kMixDedupCap = 512;

  DiscreteMeasure Mix(const DiscreteMeasure& nu, double t) const {
    FIELDPLAY_CHECK_ARG(SharesMetric(nu), "mix: metric handles differ");
    FIELDPLAY_CHECK_ARG(IsFinite(t) && t >= 0.0 && t <= 1.0,
                        "mix: t=", t, " outside [0,1]");
    if (t == 0.0) return *this;
    if (t == 1.0) return nu;
    DiscreteMeasure out(metric_);
    out.atoms_.reserve(atoms_.size() + nu.atoms_.size());
    for (const Atom& a : atoms_) {
      out.atoms_.push_back({a.point, (1.0 - t) * a.weight});
    }
    const MetricFn& d = *metric_;
    const bool scan = atoms_.size() <= kMixDedupCap;
    for (const Atom& b : nu.atoms_) {
      bool merged = false;
      if (scan) {
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
          if (d(out.atoms_[i].point, b.point) < kDedupTol) {
            out.atoms_[i].weight += t * b.weight;
            merged = true;
            break;
          }
        }
      }
      if (!merged) out.atoms_.push_back({b.point, t * b.weight});
    }
    out.PruneAndNormalize();
    return out;
  }

  // sum_i w_i f(a_i).
  double Integrate(const std::function<double(const Point&)>& f) const {
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      double value = f(atoms_[i].point);
      if (!IsFinite(value)) {
        throw NonFiniteIntegrandError(
            static_cast<int>(i),
            internal::StrCat("fieldplay: integrand non-finite on atom ", i));
      }
      total += atoms_[i].weight * value;
    }
    return total;
  }

  // Exact Wasserstein-1 distance under the shared ground metric.
  double Wasserstein1(const DiscreteMeasure& nu,
                      int lp_cap = kDefaultLpCap) const {
    FIELDPLAY_CHECK_ARG(SharesMetric(nu), "wasserstein1: metric handles differ");
    const int msize = static_cast<int>(atoms_.size());
    const int nsize = static_cast<int>(nu.atoms_.size());
    FIELDPLAY_CHECK_ARG(
        msize + nsize <= lp_cap, "wasserstein1: combined support ",
        msize + nsize, " exceeds the LP cap ", lp_cap,
        "; subsample the measures or raise the cap");
    std::vector<double> a(msize), b(nsize), cost(
        static_cast<std::size_t>(msize) * nsize);
    const MetricFn& d = *metric_;
    for (int i = 0; i < msize; ++i) a[i] = atoms_[i].weight;
    for (int j = 0; j < nsize; ++j) b[j] = nu.atoms_[j].weight;
    for (int i = 0; i < msize; ++i) {
      for (int j = 0; j < nsize; ++j) {
        double dist = d(atoms_[i].point, nu.atoms_[j].point);
        FIELDPLAY_CHECK_ARG(IsFinite(dist) && dist >= 0.0,
                            "wasserstein1: invalid ground distance");
        cost[static_cast<std::size_t>(i) * nsize + j] = dist;
      }
    }
    return SolveTransport(a, b, cost).cost;
  }

  // Re-applies dedup, pruning and renormalization.
  DiscreteMeasure Normalized(double dedup_tol = kDedupTol) const {
    return FromAtoms(atoms_, metric_, dedup_tol);
  }

  std::span<const Atom> atoms() const { return atoms_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  const MetricPtr& metric() const { return metric_; }
  bool SharesMetric(const DiscreteMeasure& other) const {
    return metric_ == other.metric_;
  }

  double TotalMass() const {
    double mass = 0.0;
    for (const Atom& a : atoms_) mass += a.weight;
    return mass;
  }

  double Distance(const Point& a, const Point& b) const {
    return (*metric_)(a, b);
  }

  nlohmann::json ToJson(
      const std::function<nlohmann::json(const Point&)>& encode_point) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Atom& a : atoms_) {
      arr.push_back({{"point", encode_point(a.point)}, {"weight", a.weight}});
    }
    return nlohmann::json{{"atoms", std::move(arr)}};
  }

 private:
  explicit DiscreteMeasure(MetricPtr metric) : metric_(std::move(metric)) {}

  void MergeAppend(std::vector<Atom> in, double dedup_tol) {
    const MetricFn& d = *metric_;
    for (Atom& a : in) {
      bool merged = false;
      for (Atom& kept : atoms_) {
        if (d(kept.point, a.point) < dedup_tol) {
          kept.weight += a.weight;
          merged = true;
          break;
        }
      }
      if (!merged) atoms_.push_back(std::move(a));
    }
  }

  void PruneAndNormalize() {
    double mass = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      mass += atoms_[i].weight;
      if (atoms_[i].weight > atoms_[best].weight) best = i;
    }
    FIELDPLAY_CHECK(mass > 0.0, "measure lost all mass");
    std::vector<Atom> kept;
    kept.reserve(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].weight >= kPruneTol * mass || i == best) {
        kept.push_back(std::move(atoms_[i]));
      }
    }
    atoms_ = std::move(kept);
    double kept_mass = 0.0;
    for (const Atom& a : atoms_) kept_mass += a.weight;
    for (Atom& a : atoms_) a.weight /= kept_mass;
  }

  MetricPtr metric_;
  std::vector<Atom> atoms_;
};

template <typename Point>
using MetricPtrOf = typename DiscreteMeasure<Point>::MetricPtr;

template <typename Point>
MetricPtrOf<Point> MakeMetric(
    std::function<double(const Point&, const Point&)> fn) {
  return std::make_shared<const typename DiscreteMeasure<Point>::MetricFn>(
      std::move(fn));
}

}  // namespace fieldplay

#endif  // FIELDPLAY_MEASURE_H_
