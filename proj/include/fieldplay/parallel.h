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

#ifndef FIELDPLAY_PARALLEL_H_
#define FIELDPLAY_PARALLEL_H_

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace fieldplay {

// Runs fn(i) for i in [0, n) on up to `threads` workers with static block
// partitioning. Results must be written to per-index slots so the outcome is
// independent of scheduling. The lowest-index exception wins and is rethrown.
inline void ParallelFor(int n, const std::function<void(int)>& fn,
                        int threads = 0) {
  if (n <= 0) return;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = hw > 0 ? hw : 1;
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(threads);
  std::vector<int> error_index(threads, -1);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int lo = t * chunk;
    int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, t, lo, hi] {
      for (int i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
          error_index[t] = i;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();

  int first = -1;
  std::exception_ptr to_throw;
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (errors[t] && (first < 0 || error_index[t] < first)) {
      first = error_index[t];
      to_throw = errors[t];
    }
  }
  if (to_throw) std::rethrow_exception(to_throw);
}

}  // namespace fieldplay

#endif  // FIELDPLAY_PARALLEL_H_
