// Copyright 2026 The DRLT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment configuration (JSON) with desk and full profiles.
//
// Desk profile: 20 runs, log-lambda step 1.0, 5 folds, 30 gate redraws, at
// most 8 gate evaluations, 10 RANSAC subsets. The full profile restores
// 100 runs, step 0.25, 10 folds, 100 redraws, an unlimited gate and 500
// subsets. Keys present in the JSON always win over the profile.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "drlt/datagen.hpp"
#include "drlt/selection.hpp"

namespace drlt::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentId { table1, delta_suite, beta_suite, rrmse_suite, qq_export };
const char* to_string(ExperimentId id);
ExperimentId experiment_from_string(const std::string& s);

enum class SweepParameter { f_adv, n, f_sigma, f_sp };
const char* to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& s);

struct Sweep {
  std::string label;  // e.g. "E1"
  SweepParameter parameter = SweepParameter::f_adv;
  std::vector<double> values;
};

// Applies one sweep value to a copy of the fixed parameters.
GenParams at_point(const GenParams& fixed, SweepParameter parameter, double value);

struct ExperimentConfig {
  ExperimentId id = ExperimentId::delta_suite;
  std::vector<Sweep> sweeps;
  GenParams fixed;
  int runs = 20;
  double alpha = 0.01;
  std::uint64_t seed = 1;
  LambdaGrid grid;
  RansacConfig ransac;
  bool full = false;

  void validate() const;
  nlohmann::json to_json() const;
};

std::vector<Sweep> default_sweeps(ExperimentId id);
ExperimentConfig default_config(ExperimentId id, bool full = false);
// Profile defaults for `id`, overlaid with the keys of `j`. Throws
// ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentId id, bool full = false);
nlohmann::json parse_json_text(const std::string& text);

// Settings of the single-instance subcommands (gen, fit, test).
struct InstanceConfig {
  std::optional<std::string> instance_file;  // JSON bundle; else generated
  GenParams params;
  std::optional<double> lambda1;  // grid scale; selected when absent
  std::optional<double> lambda2;
  double alpha = 0.01;
  std::string method = "both";  // drlt | odrlt | both
  LambdaGrid grid;
};
InstanceConfig instance_config_from_json(const nlohmann::json& j, bool full = false);
nlohmann::json to_json(const InstanceConfig& c);

}  // namespace drlt::harness
