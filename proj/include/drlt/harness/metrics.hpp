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

// Evaluation measures of the Monte Carlo experiments.

#include <optional>
#include <vector>

#include "drlt/types.hpp"

namespace drlt::harness {

struct DetectionRates {
  std::optional<double> sensitivity;  // missing when truth has no positives
  std::optional<double> specificity;  // missing when truth has no negatives
};

DetectionRates sensitivity_specificity(const std::vector<bool>& decisions,
                                       const std::vector<bool>& truth);

// ||beta* - beta_hat||_2 / ||beta*||_2
double rrmse(const Vector& beta_hat, const Vector& beta_star);

struct QQPair {
  double theoretical = 0.0;
  double empirical = 0.0;
};

// Sorted samples paired with Phi^{-1}((k - 0.5) / m), k = 1..m.
std::vector<QQPair> qq_pairs(std::vector<double> samples);

struct Summary {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(count); 0 for one value
  Index count = 0;
};

// Summary of the present values; count 0 when none are present.
Summary summarize(const std::vector<std::optional<double>>& values);

}  // namespace drlt::harness
