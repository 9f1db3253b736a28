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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fieldplay/runner.h"

namespace {

int RunCommand(const std::string& config_path, const std::string& out_override,
               bool seed_given, std::uint64_t seed_override, int rounds_override,
               bool quiet, bool timing) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config " << config_path << "\n";
    return 1;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  fieldplay::ExperimentConfig config;
  try {
    config = fieldplay::ParseConfig(buffer.str());
  } catch (const fieldplay::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!out_override.empty()) config.out = out_override;
  if (seed_given) config.seed = seed_override;
  if (rounds_override >= 0) config.learner.stop.max_rounds = rounds_override;
  if (timing) config.timing = true;

  try {
    return fieldplay::RunExperiment(config, quiet).exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fieldplay: fictitious play and online mirror descent on monotone "
      "anonymous games and first-order mean field games"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  int rounds_override = -1;
  bool quiet = false, timing = false;

  CLI::App* run = app.add_subcommand("run", "execute a config");
  run->add_option("config", config_path, "path to a JSON config")->required();
  run->add_option("--out", out_override, "output directory override");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed_override, "seed override");
  run->add_option("--rounds", rounds_override, "max_rounds override");
  run->add_flag("--quiet", quiet, "suppress progress output");
  run->add_flag("--timing", timing,
                "record wall-clock ms in trace.csv (breaks byte "
                "reproducibility of traces)");

  CLI11_PARSE(app, argc, argv);
  return RunCommand(config_path, out_override, seed_opt->count() > 0,
                    seed_override, rounds_override, quiet, timing);
}
