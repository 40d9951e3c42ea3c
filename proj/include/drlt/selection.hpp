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

// Regularisation and threshold selection.
//
// Grid values are penalties of the unnormalised objectives
//   ||y - A b - d||^2 + lam1 ||b||_1 + lam2 ||d||_1,   ||y - A b||^2 + lam ||b||_1,
// and are divided by 2n before reaching the (1/2n)-scaled solvers, so a grid
// value means the same thing for every subsample size.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "drlt/debias.hpp"
#include "drlt/lasso.hpp"
#include "drlt/rng.hpp"
#include "drlt/types.hpp"

namespace drlt {

struct LambdaGrid {
  std::vector<double> log_values;  // natural log, shared by lam1 and lam2
  double gate_fraction = 0.70;
  double gate_alpha = 0.01;
  int gate_redraws = 100;
  // Gate evaluations in increasing CV-error order before falling back.
  int gate_max_candidates = 625;
  int folds = 10;
  // Relative KKT tolerance of the cross-validation fits.
  double cv_kkt_tol = 1e-4;

  // log lambda in [lo : step : hi]
  static LambdaGrid range(double lo = 1.0, double hi = 7.0, double step = 0.25);
  std::vector<double> values() const;
  void validate() const;
};

inline double squared_loss_lambda(double grid_value, Index n) {
  return grid_value / (2.0 * static_cast<double>(n));
}

RobustLassoFit fit_robust(const Vector& y, const Matrix& A, double lam1, double lam2,
                          const WarmStart* warm = nullptr, double kkt_tol = 1e-6);
LassoFit fit_l2(const Vector& y, const Matrix& A, double lam, const Vector* warm = nullptr,
                double kkt_tol = 1e-6);
LassoFit fit_l1(const Vector& y, const Matrix& A, double lam);

// Deterministic fold label of every row: a seeded shuffle dealt round-robin.
std::vector<int> fold_labels(Index n, int folds, std::uint64_t seed);

Matrix rows_of(const Matrix& A, const std::vector<Index>& rows);
Vector rows_of(const Vector& y, const std::vector<Index>& rows);

// Mean over folds of ||y_cv - A_cv b - I_cv d||^2 with (b, d) fitted on the
// other folds; held-out rows carry no fitted d, so I_cv d = 0.
double cv_error(const Vector& y, const Matrix& A, double lam1, double lam2, int folds,
                std::uint64_t seed, double kkt_tol = 1e-4);

// CV error of every (lam1, lam2) on the grid, entry (i, k) for
// lam1 = values[i], lam2 = values[k]. Fits along each fold reuse warm starts.
Matrix cv_error_grid(const Vector& y, const Matrix& A, const std::vector<double>& values,
                     int folds, std::uint64_t seed, double kkt_tol = 1e-4);

enum class SingleLambdaModel { l2, l1, l2_augmented };
// CV error of a single-penalty estimator for every grid value.
Vector cv_error_single(const Vector& y, const Matrix& A, const std::vector<double>& values,
                       SingleLambdaModel model, int folds, std::uint64_t seed,
                       double kkt_tol = 1e-4);

struct GateResult {
  double beta_pass = 0.0;   // fraction of coordinates passing Lilliefors
  double delta_pass = 0.0;
  bool passed = false;
};

// Inputs of the normality gate: weights with their covariance diagonals and a
// source of independent measurement redraws of the same instance.
struct GateContext {
  const Matrix* W = nullptr;
  const CovarianceDiagonals* cov = nullptr;
  std::function<Vector(int)> redraw;
};

GateResult normality_gate(const Matrix& A, double lam1, double lam2, const GateContext& ctx,
                          const LambdaGrid& grid);

struct SelectionTraceRow {
  double log_lambda1 = 0.0;
  double log_lambda2 = 0.0;
  double cv_error = 0.0;
  bool gate_evaluated = false;
  GateResult gate;
};

struct LambdaSelection {
  double lambda1 = 0.0;  // grid scale
  double lambda2 = 0.0;
  double cv_error = 0.0;
  GateResult gate;
  bool fallback = false;  // no evaluated pair passed the gate
  int gate_evaluations = 0;
  std::vector<SelectionTraceRow> trace;
};

// Pairs are visited in increasing CV error (ties by grid position) and the
// first to pass the gate is returned, which is the CV minimiser among gate
// survivors. Without a survivor the pure CV minimiser is returned, flagged.
LambdaSelection select_lambdas(const Vector& y, const Matrix& A, const GateContext& gate,
                               const LambdaGrid& grid, std::uint64_t seed);

struct SingleSelection {
  double lambda = 0.0;
  double cv_error = 0.0;
  Vector errors;
};
SingleSelection select_single_lambda(const Vector& y, const Matrix& A, const LambdaGrid& grid,
                                     SingleLambdaModel model, std::uint64_t seed);

void write_selection_trace_csv(std::ostream& os, const LambdaSelection& s);

// Threshold maximising sensitivity + specificity - 1 for the rule
// score >= tau. Candidates are the smallest score and the midpoints of
// consecutive distinct scores; ties go to the smallest tau.
double youden_threshold(const std::vector<double>& scores, const std::vector<bool>& truth);
double youden_index(const std::vector<double>& scores, const std::vector<bool>& truth, double tau);

enum class RansacBase { l1, l2 };

struct RansacConfig {
  int subsets = 500;
  double subset_fraction = 0.9;
  RansacBase base = RansacBase::l2;
  void validate() const;
};

struct RansacResult {
  Vector beta;
  std::vector<Index> consensus;
  Index winner = 0;
  std::vector<Index> votes_per_model;
};

RansacResult ransac_fit(const Vector& y, const Matrix& A, const RansacConfig& cfg, double lambda,
                        Rng& rng);

}  // namespace drlt
