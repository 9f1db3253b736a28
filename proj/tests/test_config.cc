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

#include "fieldplay/config.h"

#include <doctest.h>

namespace fieldplay {
namespace {

TEST_CASE("minimal population config fills the documented defaults") {
  ExperimentConfig cfg = ParseConfig(R"({"game": "population"})");
  CHECK(cfg.players == 100);
  CHECK(cfg.learner.stop.max_rounds == 500);
  CHECK(cfg.learner.type == "fp");
  CHECK(cfg.population.n_actions == 3);
  CHECK(cfg.population.cost == "congestion-linear");
  CHECK(cfg.seed == 0);
}

TEST_CASE("comments in configs are tolerated") {
  ExperimentConfig cfg = ParseConfig(R"({
    // three-action congestion game
    "game": "population",
    "players": 12
  })");
  CHECK(cfg.players == 12);
}

TEST_CASE("range errors carry the valid range") {
  try {
    ParseConfig(R"({"game": "mfg", "mfg": {"M": -1.0}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.errors().size() == 1);
    CHECK(e.errors()[0] == "M must be > 0");
  }
}

TEST_CASE("all validation problems are reported at once") {
  try {
    ParseConfig(R"({
      "game": "mfg",
      "players": 0,
      "mfg": {"M": -1.0, "T": 0.0, "nt": 0},
      "learner": {"type": "sgd"}
    })");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.errors().size() == 5);
  }
}

TEST_CASE("unknown keys are named") {
  try {
    ParseConfig(R"({"game": "population", "playerz": 10})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.errors().size() == 1);
    CHECK(e.errors()[0].find("playerz") != std::string::npos);
  }
  try {
    ParseConfig(R"({"game": "mfg", "mfg": {"dt": 0.1}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.errors()[0].find("mfg.dt") != std::string::npos);
  }
}

TEST_CASE("full mfg config round-trips exactly") {
  const std::string text = R"({
    "game": "mfg",
    "players": 50,
    "seed": 12345,
    "out": "runs/omd",
    "threads": 2,
    "lp_cap": 2048,
    "timing": false,
    "mfg": {
      "d": 1, "T": 1.0, "nt": 32, "M": 4.0,
      "lagrangian": "quadratic", "lagrangian_weight": 1.0,
      "f": {"name": "linear-mean", "weight": 0.5},
      "g": {"name": "target-quadratic", "weight": 1.0, "target": [0.5]},
      "m0": {"kind": "uniform", "radius": 1.0}
    },
    "learner": {
      "type": "omd",
      "beta_exponent": 1.0,
      "stop": {"max_rounds": 2000, "phi_tol": 0.0001}
    },
    "reference": {"kind": "fp", "rounds": 4000}
  })";
  ExperimentConfig cfg = ParseConfig(text);
  std::string canonical = SerializeConfig(cfg);
  ExperimentConfig reparsed = ParseConfig(canonical);
  CHECK(SerializeConfig(reparsed) == canonical);
  CHECK(reparsed.mfg.f.name == "linear-mean");
  CHECK(reparsed.mfg.g.target == std::vector<double>{0.5});
  CHECK(reparsed.learner.stop.max_rounds == 2000);
  CHECK(reparsed.reference.rounds == 4000);
  CHECK(reparsed.seed == 12345);
}

TEST_CASE("coupling and cost names are validated") {
  CHECK_THROWS_AS(
      ParseConfig(R"({"game": "mfg", "mfg": {"f": {"name": "cubic"}}})"),
      ConfigError);
  CHECK_THROWS_AS(
      ParseConfig(R"({"game": "population", "population": {"cost": "x"}})"),
      ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"game": "tictactoe"})"), ConfigError);
}

TEST_CASE("malformed JSON is a single clear error") {
  CHECK_THROWS_AS(ParseConfig("{"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("[]"), ConfigError);
}

TEST_CASE("mfg omd cannot use the brute-force reference") {
  CHECK_THROWS_AS(ParseConfig(R"({
    "game": "mfg",
    "learner": {"type": "omd"},
    "reference": {"kind": "brute-force"}
  })"),
                  ConfigError);
}

}  // namespace
}  // namespace fieldplay
