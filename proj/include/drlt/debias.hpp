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

// Debiasing of the robust Lasso.
//
//   beta_W  = beta_hat + W^T r / n,           r = y - A beta_hat - delta_hat
//   delta_W = delta_hat + (I - W A^T / n) r
//
// W = A gives the plain debiased estimator; design_W returns the
// variance-minimising weights subject to the constraints
//
//   C0  ||w_.j||^2 / n <= 1                       for every column j
//   C1  |I_p - W^T A / n|_inf <= mu1
//   C2  |(I_n - W A^T / n) A / p|_inf <= mu2
//   C3  |W A^T / p - I_n|_inf <= mu3s
//
// C3 is kept in this multiplied-out form, with mu3s = mu3 sqrt(1 - n/p), which
// stays finite at n = p.

#include <optional>
#include <string>

#include "drlt/box_qp.hpp"
#include "drlt/lasso.hpp"
#include "drlt/linmodel.hpp"
#include "drlt/types.hpp"

namespace drlt {

struct ApproxInverse {
  Matrix M;
  double mu = 0.0;
  bool feasible = false;
  double max_violation = 0.0;
  int iterations = 0;
  std::string status;
};

struct ApproxInverseSettings {
  AdmmSettings admm = [] {
    AdmmSettings s;
    s.eps_abs = 1e-7;
    s.eps_rel = 1e-7;
    s.max_iter = 4000;
    return s;
  }();
  double feas_tol = 1e-6;
};

// Rows m_i of M minimise m_i^T S m_i subject to |S m_i - e_i|_inf <= mu with
// S = A^T A / n. `rows` limits the solve to the first `rows` rows of M (all
// when negative); the remaining rows are set to e_i. If any solved row is
// infeasible, M = I.
ApproxInverse build_M(const Matrix& A, double mu, const ApproxInverseSettings& s = {},
                      Index rows = -1);

struct Mus {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
};

// mu1 = 2 sqrt(2 log p / n), mu2 = 2 sqrt(log(2np) / (np)) + 1/n,
// mu3 = 2 / sqrt(1 - n/p) sqrt(2 log n / p). Requires n < p.
Mus default_mus(Index n, Index p);

struct DesignLevels {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3_scaled = 0.0;
};

DesignLevels design_levels(const Mus& mus, Index n, Index p);
// Default levels for n <= p: mu3_scaled = 2 sqrt(2 log n / p).
DesignLevels default_design_levels(Index n, Index p);

enum class WeightSource { identity_of_A, designed, fallback };
const char* to_string(WeightSource s);

struct ConstraintResiduals {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double max() const;
};

// Violations max(lhs - level, 0) of C0..C3 at W (C0 measured as
// max_j ||w_.j||^2 / n - 1).
ConstraintResiduals design_residuals(const Matrix& W, const Matrix& A, const DesignLevels& lv);

struct DebiasWeights {
  Matrix W;
  WeightSource source = WeightSource::identity_of_A;
  Mus mus;
  DesignLevels levels;
  ConstraintResiduals constraint_residuals;
  double objective = 0.0;
  int iterations = 0;
  double blend = 0.0;
  std::string solver_status;
};

struct DesignSettings {
  AdmmSettings admm = [] {
    AdmmSettings s;
    s.eps_abs = 1e-5;
    s.eps_rel = 1e-5;
    s.max_iter = 600;
    return s;
  }();
  double feas_tol = 1e-6;
};

DebiasWeights identity_weights(const Matrix& A);
DebiasWeights design_W(const Matrix& A, const DesignLevels& lv, const DesignSettings& s = {});
DebiasWeights design_W(const Matrix& A, double mu1, double mu2, double mu3,
                       const DesignSettings& s = {});

Vector debias_beta(const Vector& beta_hat, const Vector& delta_hat, const Matrix& W,
                   const Vector& y, const Matrix& A);
Vector debias_beta(const RobustLassoFit& fit, const Matrix& W, const Vector& y, const Matrix& A);

// delta_hat + (I - W A^T / n) r.
Vector debias_delta(const Vector& beta_hat, const Vector& delta_hat, const Matrix& W,
                    const Vector& y, const Matrix& A);
Vector debias_delta(const RobustLassoFit& fit, const Matrix& W, const Vector& y, const Matrix& A);
// y - A beta_W. Equal to debias_delta when W A^T is symmetric (e.g. W = A);
// in general the two differ by (W A^T - A W^T) r / n.
Vector debias_delta_direct(const RobustLassoFit& fit, const Matrix& W, const Vector& y,
                           const Matrix& A);

// diag((I - A A^T / n)(I - A A^T / n)^T)
Vector sigma_A_diag(const Matrix& A);
// sigma^2 ||w_.j||^2 / n
Vector sigma_beta_diag(const Matrix& W, double sigma);
// sigma^2 diag((I - W A^T / n)(I - W A^T / n)^T)
Vector sigma_delta_diag(const Matrix& W, const Matrix& A, double sigma);

struct CovarianceDiagonals {
  Vector sigma_A;
  Vector sigma_beta;
  Vector sigma_delta;
};
CovarianceDiagonals covariance_diagonals(const Matrix& W, const Matrix& A, double sigma);

struct ErrorTerms {
  Vector noise;
  Vector bias_beta;
  Vector bias_delta;
  Vector total() const { return noise + bias_beta + bias_delta; }
};

struct DebiasDecomposition {
  ErrorTerms beta;   // beta_W - beta*
  ErrorTerms delta;  // delta_W - delta*
};

// Requires the noise realisation eta = y - A_hat beta*.
DebiasDecomposition decompose_debias_error(const ProblemInstance& inst, const RobustLassoFit& fit,
                                           const Matrix& W);

}  // namespace drlt
