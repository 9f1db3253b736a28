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

#include <cmath>
#include <cstddef>

#include "fieldplay/common.h"
#include "fieldplay/learning.h"

namespace fieldplay {

bool SequenceLemmaCheck(std::span<const double> phi,
                        std::span<const double> eps) {
  FIELDPLAY_CHECK_ARG(phi.size() >= 2, "phi needs at least two entries");
  FIELDPLAY_CHECK_ARG(eps.size() == phi.size() - 1,
                      "eps length must be phi length - 1, got ", eps.size(),
                      " vs ", phi.size());
  for (double v : phi) FIELDPLAY_CHECK_ARG(IsFinite(v), "non-finite phi entry");
  for (double v : eps) FIELDPLAY_CHECK_ARG(IsFinite(v), "non-finite eps entry");

  const std::size_t count = phi.size();
  for (double v : phi) {
    if (v < -1e-9) return false;
  }

  // Hypothesis at every index n = 1..count-1 (phi[0] is phi_1):
  //   phi_{n+1} - phi_n <= -phi_n/(n+1) + eps_n/n.
  for (std::size_t k = 0; k + 1 < count; ++k) {
    double n = static_cast<double>(k + 1);
    double lhs = phi[k + 1] - phi[k];
    double rhs = -phi[k] / (n + 1.0) + eps[k] / n;
    double slack = 1e-12 * (1.0 + std::abs(phi[k]) + std::abs(eps[k]));
    if (lhs > rhs + slack) return false;
  }

  // Conclusion via the proof's bound b_n = n*phi_n <= b_1 + 2*sum |eps_i|,
  // checked on the last quarter of the sequence.
  double abs_eps_sum = 0.0;
  std::size_t tail_begin = count - std::max<std::size_t>(count / 4, 1);
  for (std::size_t k = 0; k + 1 < count; ++k) {
    abs_eps_sum += std::abs(eps[k]);
    std::size_t n_next = k + 2;  // index of phi_{n+1}
    if (n_next - 1 >= tail_begin) {
      double bound = (phi[0] + 2.0 * abs_eps_sum) / static_cast<double>(n_next);
      if (phi[n_next - 1] > bound + 1e-9) return false;
    }
  }
  return true;
}

}  // namespace fieldplay
