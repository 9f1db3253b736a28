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

#include <set>

#include <nlohmann/json.hpp>

namespace fieldplay {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&errors] {
        std::string all = "invalid config:";
        for (const auto& e : errors) all += "\n  - " + e;
        return all;
      }()),
      errors_(std::move(errors)) {}

namespace {

class Validator {
 public:
  void Error(const std::string& message) { errors_.push_back(message); }

  void KnownKeys(const json& obj, const std::string& where,
                 const std::set<std::string>& keys) {
    for (const auto& [key, value] : obj.items()) {
      if (!keys.contains(key)) {
        Error("unknown key '" + where + key + "'");
      }
    }
  }

  template <typename T>
  void Read(const json& obj, const std::string& where, const std::string& key,
            T& out) {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      Error("key '" + where + key + "' has the wrong type");
    }
  }

  void Require(bool ok, const std::string& message) {
    if (!ok) Error(message);
  }

  void Finish() {
    if (!errors_.empty()) throw ConfigError(std::move(errors_));
  }

 private:
  std::vector<std::string> errors_;
};

void ParseStop(Validator& v, const json& obj, const std::string& where,
               StopRule& stop) {
  v.KnownKeys(obj, where, {"max_rounds", "phi_tol"});
  v.Read(obj, where, "max_rounds", stop.max_rounds);
  v.Read(obj, where, "phi_tol", stop.phi_tol);
  v.Require(stop.max_rounds >= 0,
            "'" + where + "max_rounds' must be >= 0");
  v.Require(stop.phi_tol >= 0.0, "'" + where + "phi_tol' must be >= 0");
}

void ParseCoupling(Validator& v, const json& obj, const std::string& where,
                   CouplingSpec& spec) {
  v.KnownKeys(obj, where, {"name", "weight", "sigma", "target"});
  v.Read(obj, where, "name", spec.name);
  v.Read(obj, where, "weight", spec.weight);
  v.Read(obj, where, "sigma", spec.sigma);
  v.Read(obj, where, "target", spec.target);
  static const std::set<std::string> kNames = {
      "zero", "gaussian", "neg-gaussian", "quadratic", "linear-mean",
      "target-quadratic"};
  v.Require(kNames.contains(spec.name),
            "'" + where + "name' must be one of zero, gaussian, neg-gaussian, "
            "quadratic, linear-mean, target-quadratic");
  v.Require(spec.sigma > 0.0, "'" + where + "sigma' must be > 0");
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& text) {
  json root;
  try {
    root = json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/true,
                       /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"top level must be an object"});

  Validator v;
  ExperimentConfig cfg;

  v.KnownKeys(root, "", {"game", "population", "mfg", "learner", "reference",
                         "players", "seed", "out", "threads", "lp_cap",
                         "timing", "audit_monotonicity"});
  v.Read(root, "", "game", cfg.game);
  v.Require(cfg.game == "population" || cfg.game == "mfg",
            "'game' must be population or mfg");
  v.Read(root, "", "players", cfg.players);
  v.Require(cfg.players >= 1, "'players' must be >= 1");
  v.Read(root, "", "seed", cfg.seed);
  v.Read(root, "", "out", cfg.out);
  v.Read(root, "", "threads", cfg.threads);
  v.Read(root, "", "lp_cap", cfg.lp_cap);
  v.Require(cfg.lp_cap >= 4, "'lp_cap' must be >= 4");
  v.Read(root, "", "timing", cfg.timing);
  v.Read(root, "", "audit_monotonicity", cfg.audit_monotonicity);
  v.Require(cfg.audit_monotonicity >= 0,
            "'audit_monotonicity' must be >= 0");

  if (root.contains("population")) {
    const json& pop = root.at("population");
    v.KnownKeys(pop, "population.", {"n_actions", "cost", "slope", "offset",
                                     "initial", "oracle_grid"});
    v.Read(pop, "population.", "n_actions", cfg.population.n_actions);
    v.Read(pop, "population.", "cost", cfg.population.cost);
    v.Read(pop, "population.", "slope", cfg.population.slope);
    v.Read(pop, "population.", "offset", cfg.population.offset);
    v.Read(pop, "population.", "initial", cfg.population.initial);
    v.Read(pop, "population.", "oracle_grid", cfg.population.oracle_grid);
    v.Require(cfg.population.n_actions >= 2,
              "'population.n_actions' must be >= 2");
    static const std::set<std::string> kCosts = {
        "congestion-linear", "congestion-affine", "constant",
        "anti-congestion"};
    v.Require(kCosts.contains(cfg.population.cost),
              "'population.cost' must be one of congestion-linear, "
              "congestion-affine, constant, anti-congestion");
    v.Require(cfg.population.initial == "default" ||
                  cfg.population.initial == "random",
              "'population.initial' must be default or random");
    v.Require(cfg.population.oracle_grid >= 1 &&
                  cfg.population.oracle_grid <= 200,
              "'population.oracle_grid' must be in [1, 200]");
  }

  if (root.contains("mfg")) {
    const json& mfg = root.at("mfg");
    v.KnownKeys(mfg, "mfg.", {"d", "T", "nt", "M", "lagrangian",
                              "lagrangian_weight", "f", "g", "m0"});
    v.Read(mfg, "mfg.", "d", cfg.mfg.d);
    v.Read(mfg, "mfg.", "T", cfg.mfg.T);
    v.Read(mfg, "mfg.", "nt", cfg.mfg.nt);
    v.Read(mfg, "mfg.", "M", cfg.mfg.M);
    v.Read(mfg, "mfg.", "lagrangian", cfg.mfg.lagrangian);
    v.Read(mfg, "mfg.", "lagrangian_weight", cfg.mfg.lagrangian_weight);
    v.Require(cfg.mfg.d >= 1, "'mfg.d' must be >= 1");
    v.Require(cfg.mfg.T > 0.0, "'mfg.T' must be > 0");
    v.Require(cfg.mfg.nt >= 1, "'mfg.nt' must be >= 1");
    v.Require(cfg.mfg.M > 0.0, "M must be > 0");
    v.Require(cfg.mfg.lagrangian == "quadratic",
              "'mfg.lagrangian' must be quadratic");
    v.Require(cfg.mfg.lagrangian_weight > 0.0,
              "'mfg.lagrangian_weight' must be > 0");
    if (mfg.contains("f")) ParseCoupling(v, mfg.at("f"), "mfg.f.", cfg.mfg.f);
    if (mfg.contains("g")) ParseCoupling(v, mfg.at("g"), "mfg.g.", cfg.mfg.g);
    if (mfg.contains("m0")) {
      const json& m0 = mfg.at("m0");
      v.KnownKeys(m0, "mfg.m0.", {"kind", "radius", "sigma"});
      v.Read(m0, "mfg.m0.", "kind", cfg.mfg.m0_kind);
      v.Read(m0, "mfg.m0.", "radius", cfg.mfg.m0_radius);
      v.Read(m0, "mfg.m0.", "sigma", cfg.mfg.m0_sigma);
      v.Require(cfg.mfg.m0_kind == "uniform" || cfg.mfg.m0_kind == "gaussian",
                "'mfg.m0.kind' must be uniform or gaussian");
      v.Require(cfg.mfg.m0_radius > 0.0, "'mfg.m0.radius' must be > 0");
      v.Require(cfg.mfg.m0_sigma > 0.0, "'mfg.m0.sigma' must be > 0");
    }
  }

  if (root.contains("learner")) {
    const json& learner = root.at("learner");
    v.KnownKeys(learner, "learner.", {"type", "beta_exponent", "stop"});
    v.Read(learner, "learner.", "type", cfg.learner.type);
    v.Read(learner, "learner.", "beta_exponent", cfg.learner.beta_exponent);
    v.Require(cfg.learner.type == "fp" || cfg.learner.type == "omd",
              "'learner.type' must be fp or omd");
    v.Require(cfg.learner.beta_exponent > 0.5 &&
                  cfg.learner.beta_exponent <= 1.0,
              "'learner.beta_exponent' must be in (0.5, 1]");
    if (learner.contains("stop")) {
      ParseStop(v, learner.at("stop"), "learner.stop.", cfg.learner.stop);
    }
  }

  if (root.contains("reference")) {
    const json& ref = root.at("reference");
    v.KnownKeys(ref, "reference.", {"kind", "rounds"});
    v.Read(ref, "reference.", "kind", cfg.reference.kind);
    v.Read(ref, "reference.", "rounds", cfg.reference.rounds);
    static const std::set<std::string> kKinds = {"auto", "none", "brute-force",
                                                 "fp"};
    v.Require(kKinds.contains(cfg.reference.kind),
              "'reference.kind' must be one of auto, none, brute-force, fp");
    v.Require(cfg.reference.rounds >= 0, "'reference.rounds' must be >= 0");
  }

  // Cross checks that need the final values.
  if (cfg.game == "population" &&
      cfg.population.cost == "congestion-affine") {
    v.Require(cfg.population.slope.empty() ||
                  static_cast<int>(cfg.population.slope.size()) ==
                      cfg.population.n_actions,
              "'population.slope' needs n_actions entries");
  }
  if (cfg.game == "population" &&
      (cfg.population.cost == "congestion-affine" ||
       cfg.population.cost == "constant")) {
    v.Require(cfg.population.offset.empty() ||
                  static_cast<int>(cfg.population.offset.size()) ==
                      cfg.population.n_actions,
              "'population.offset' needs n_actions entries");
  }
  if (cfg.game == "population") {
    v.Require(cfg.reference.kind != "fp",
              "'reference.kind' fp applies to mfg experiments; population "
              "games use the brute-force oracle");
  }
  if (cfg.game == "mfg") {
    v.Require(cfg.mfg.f.target.empty() ||
                  static_cast<int>(cfg.mfg.f.target.size()) == cfg.mfg.d,
              "'mfg.f.target' needs d entries");
    v.Require(cfg.mfg.g.target.empty() ||
                  static_cast<int>(cfg.mfg.g.target.size()) == cfg.mfg.d,
              "'mfg.g.target' needs d entries");
    if (cfg.learner.type == "omd") {
      v.Require(cfg.reference.kind != "brute-force",
                "'reference.kind' brute-force applies to population games "
                "only");
    }
  }

  v.Finish();
  return cfg;
}

std::string SerializeConfig(const ExperimentConfig& cfg) {
  json root;
  root["game"] = cfg.game;
  root["players"] = cfg.players;
  root["seed"] = cfg.seed;
  root["out"] = cfg.out;
  root["threads"] = cfg.threads;
  root["lp_cap"] = cfg.lp_cap;
  root["timing"] = cfg.timing;
  root["audit_monotonicity"] = cfg.audit_monotonicity;

  json pop;
  pop["n_actions"] = cfg.population.n_actions;
  pop["cost"] = cfg.population.cost;
  if (!cfg.population.slope.empty()) pop["slope"] = cfg.population.slope;
  if (!cfg.population.offset.empty()) pop["offset"] = cfg.population.offset;
  pop["initial"] = cfg.population.initial;
  pop["oracle_grid"] = cfg.population.oracle_grid;
  root["population"] = std::move(pop);

  json mfg;
  mfg["d"] = cfg.mfg.d;
  mfg["T"] = cfg.mfg.T;
  mfg["nt"] = cfg.mfg.nt;
  mfg["M"] = cfg.mfg.M;
  mfg["lagrangian"] = cfg.mfg.lagrangian;
  mfg["lagrangian_weight"] = cfg.mfg.lagrangian_weight;
  auto coupling_json = [](const CouplingSpec& spec) {
    json c;
    c["name"] = spec.name;
    c["weight"] = spec.weight;
    c["sigma"] = spec.sigma;
    if (!spec.target.empty()) c["target"] = spec.target;
    return c;
  };
  mfg["f"] = coupling_json(cfg.mfg.f);
  mfg["g"] = coupling_json(cfg.mfg.g);
  json m0;
  m0["kind"] = cfg.mfg.m0_kind;
  m0["radius"] = cfg.mfg.m0_radius;
  m0["sigma"] = cfg.mfg.m0_sigma;
  mfg["m0"] = std::move(m0);
  root["mfg"] = std::move(mfg);

  json learner;
  learner["type"] = cfg.learner.type;
  learner["beta_exponent"] = cfg.learner.beta_exponent;
  learner["stop"] = {{"max_rounds", cfg.learner.stop.max_rounds},
                     {"phi_tol", cfg.learner.stop.phi_tol}};
  root["learner"] = std::move(learner);

  json ref;
  ref["kind"] = cfg.reference.kind;
  ref["rounds"] = cfg.reference.rounds;
  root["reference"] = std::move(ref);

  return root.dump(2) + "\n";
}

}  // namespace fieldplay
