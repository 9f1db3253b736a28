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

#ifndef FIELDPLAY_CONFIG_H_
#define FIELDPLAY_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fieldplay/learning.h"
#include "fieldplay/mfg.h"
#include "fieldplay/population.h"

namespace fieldplay {

// All validation errors of one parse, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct PopulationSpec {
  int n_actions = 3;
  std::string cost = "congestion-linear";
  std::vector<double> slope;
  std::vector<double> offset;
  std::string initial = "default";  // default (all on action 0) | random
  int oracle_grid = 200;
};

struct LearnerSpec {
  std::string type = "fp";  // fp | omd
  double beta_exponent = 1.0;
  StopRule stop;
};

struct ReferenceSpec {
  // auto: brute-force oracle on population games, a long tight FP run when
  // mirror descent runs on an MFG, none otherwise.
  std::string kind = "auto";  // auto | none | brute-force | fp
  int rounds = 0;             // 0 = 4x the learner's max_rounds
};

struct ExperimentConfig {
  std::string game = "population";  // population | mfg
  PopulationSpec population;
  MfgConfig mfg;
  LearnerSpec learner;
  ReferenceSpec reference;
  int players = 100;
  std::uint64_t seed = 0;
  std::string out = "fieldplay-out";
  int threads = 0;
  int lp_cap = 4096;
  bool timing = false;  // measured ms in trace.csv breaks byte-reproducibility
  // When positive, audit the cost's monotonicity on this many random
  // pushforward pairs and serialize the report into summary.json.
  int audit_monotonicity = 0;
};

// Strict parse of a JSON config (// comments allowed): unknown keys are
// named, out-of-range values report the valid range, and all problems are
// collected into a single ConfigError.
ExperimentConfig ParseConfig(const std::string& text);

// Canonical JSON with every default filled in; parsing it reproduces the
// config exactly.
std::string SerializeConfig(const ExperimentConfig& config);

}  // namespace fieldplay

#endif  // FIELDPLAY_CONFIG_H_
