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

// Sparse regression solvers.
//
//   lasso_l2:     (1/2n)||y - A b||^2 + lam ||b||_1
//   robust_lasso: (1/2n)||y - A b - d||^2 + lam1 ||b||_1 + lam2 ||d||_1
//   lasso_l1:     ||y - A b||_1 + lam ||b||_1
//
// The squared-loss problems are solved by cyclic coordinate descent with
// active-set passes. For robust_lasso the d-coordinates are exact soft
// thresholds d_i = S(y_i - a_i. b, n lam2), so each sweep is a block
// alternation between a Lasso pass on b and the closed-form d-step.
//
// Convergence is certified by the KKT residual: the largest violation of the
// subgradient optimality conditions, divided by max(1, ||A^T y||_inf / n,
// ||y||_inf / n). A fit is `converged` only when this relative residual is at
// most `kkt_tol`.

#include <optional>
#include <string>

#include "drlt/types.hpp"

namespace drlt {

struct CdSettings {
  double kkt_tol = 1e-6;
  int max_sweeps = 50000;
};

struct LassoFit {
  Vector beta;
  double lambda = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string method;
};

struct RobustLassoFit {
  Vector beta_hat;
  Vector delta_hat;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct WarmStart {
  Vector beta;
  Vector delta;
};

LassoFit lasso_l2(const Vector& y, const Matrix& A, double lambda, const CdSettings& s = {},
                  const Vector* warm_beta = nullptr);

RobustLassoFit robust_lasso(const Vector& y, const Matrix& A, double lambda1, double lambda2,
                            const CdSettings& s = {}, const WarmStart* warm = nullptr);

double robust_lasso_objective(const Vector& y, const Matrix& A, const Vector& beta,
                              const Vector& delta, double lambda1, double lambda2);
double robust_lasso_kkt(const Vector& y, const Matrix& A, const Vector& beta, const Vector& delta,
                        double lambda1, double lambda2);
double lasso_l2_objective(const Vector& y, const Matrix& A, const Vector& beta, double lambda);

struct L1Settings {
  double eps_rel = 1e-7;
  double eps_abs = 1e-9;
  int max_iter = 20000;
};

// ADMM on  min ||u||_1 + lam ||x||_1  s.t.  u = y - A b,  x = b.
// The b-step solves (I + A^T A) b = r through the n x n Cholesky factor of
// I + A A^T. `gram_rows` optionally supplies A A^T to skip forming it.
LassoFit lasso_l1(const Vector& y, const Matrix& A, double lambda, const L1Settings& s = {},
                  const Matrix* gram_rows = nullptr);

double lasso_l1_objective(const Vector& y, const Matrix& A, const Vector& beta, double lambda);

struct LambdaPair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// lam1 = 4 sigma sqrt(log p) / sqrt(n), lam2 = 4 sigma sqrt(log n) / n.
LambdaPair default_lambdas(double sigma, Index n, Index p);

}  // namespace drlt
