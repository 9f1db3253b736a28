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

#ifndef FIELDPLAY_RUNNER_H_
#define FIELDPLAY_RUNNER_H_

#include <string>

#include <nlohmann/json.hpp>

#include "fieldplay/config.h"

namespace fieldplay {

struct ExperimentOutcome {
  // 0: converged per the stopping rule; 2: finished without converging;
  // 1: the run failed (partial artifacts are preserved).
  int exit_code = 1;
  nlohmann::json summary;
};

// Executes the configured experiment and writes trace.csv, summary.json,
// config.json, final_distribution.json and plot_trace.py into config.out.
ExperimentOutcome RunExperiment(const ExperimentConfig& config,
                                bool quiet = false);

// Serializes a trace in the fixed CSV schema
// n,phi,psi,alpha,d1_ref,d1_step,max_grad,ms. With include_timing false the
// ms column is written as 0 so that seeded traces are byte-reproducible.
std::string TraceToCsv(const RunTrace& trace, bool include_timing);

}  // namespace fieldplay

#endif  // FIELDPLAY_RUNNER_H_
