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

// Monte Carlo experiment engine.
//
// Seeding: the signal, pooling design and bit-flip positions come from the
// experiment seed alone, so they are shared by every run and, where the
// swept parameter allows, by every sweep point. Noise, the selection
// instance, gate redraws, the RL training instance and RANSAC subsets are
// drawn from streams keyed by the experiment seed, the point's generation
// parameters and the run index. A point therefore yields the same numbers
// whichever suite visits it, and the engine reuses its weights, lambda
// selection and per-run fits across suites.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drlt/harness/config.hpp"
#include "drlt/harness/metrics.hpp"
#include "drlt/hypotest.hpp"

namespace drlt::harness {

struct RunRecord {
  std::string suite;
  std::string parameter;
  double value = 0.0;
  int run = 0;
  std::string method;
  std::string target;  // beta | delta
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> rrmse;
  std::optional<double> kkt;  // relative KKT residual of the coordinate-descent fit behind the method
  bool converged = true;

  nlohmann::json to_json() const;
};

struct ResultRow {
  std::string suite;
  std::string parameter;
  double value = 0.0;
  std::string method;
  std::string target;
  Index runs = 0;
  Summary sensitivity;
  Summary specificity;
  Summary rrmse;
};

struct ResultTable {
  std::vector<ResultRow> rows;  // in order of first appearance

  static ResultTable aggregate(const std::vector<RunRecord>& records);
  std::string csv() const;
  const ResultRow* find(const std::string& suite, double value, const std::string& method,
                        const std::string& target = "") const;
};

struct QQResult {
  Matrix t_beta;   // runs x p
  Matrix t_delta;  // runs x n
  Vector lilliefors_beta;
  Vector lilliefors_delta;
  double critical_value = 0.0;
  double beta_pass = 0.0;
  double delta_pass = 0.0;
};

struct FitCensus {
  Index fits = 0;
  Index converged = 0;
  double max_converged_kkt = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  ResultTable table;
  std::vector<RunRecord> records;
  nlohmann::json meta;
  std::optional<QQResult> qq;
  FitCensus census;
};

// Drops the measurements whose delta-null was rejected and refits the robust
// Lasso (grid-scale lambdas) on the rest.
RobustLassoFit flag_discard_refit(const Vector& y, const Matrix& A, const TestReport& delta_report,
                                  double lambda1, double lambda2);

// sigma, or 1e-3 * mean |y| when sigma is zero.
double effective_sigma(double sigma, const Vector& y);

class Engine {
 public:
  using Logger = std::function<void(const std::string&)>;
  explicit Engine(Logger log = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  ExperimentResult run(const ExperimentConfig& cfg);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// <dir>/<experiment>.csv, <experiment>_runs.jsonl, <experiment>_meta.json and,
// for qq_export, qq_beta.csv, qq_delta.csv and qq_summary.csv.
void write_outputs(const ExperimentResult& r, const std::filesystem::path& dir);

std::string library_version();

}  // namespace drlt::harness
