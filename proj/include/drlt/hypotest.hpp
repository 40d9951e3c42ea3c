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

// Coordinate-wise two-sided z-tests on debiased estimates.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "drlt/debias.hpp"
#include "drlt/lasso.hpp"
#include "drlt/stats.hpp"
#include "drlt/types.hpp"

namespace drlt {

enum class TestKind { drlt_beta, drlt_delta, odrlt_beta, odrlt_delta, baseline1, baseline2, baseline3 };
const char* to_string(TestKind k);

struct TestReport {
  Vector statistics;  // signed; decisions use |statistic|
  double threshold = 0.0;
  double alpha = 0.0;
  std::vector<bool> decisions;
  TestKind test_kind = TestKind::drlt_beta;

  Index rejections() const;
  // Recomputes decisions from statistics and threshold.
  static std::vector<bool> decide(const Vector& statistics, double threshold);
};

// Upper alpha/2 quantile of N(0, 1).
double z_quantile(double alpha);

TestReport make_report(Vector statistics, double alpha, TestKind kind);

// sqrt(n) beta_W / sigma
TestReport drlt_beta_test(const Vector& beta_W, double sigma, Index n, double alpha);
// delta_W / sqrt(sigma^2 Sigma_A)
TestReport drlt_delta_test(const Vector& delta_W, const Vector& sigma_A_diag, double sigma,
                           double alpha);
// sqrt(n) beta_W / sqrt(Sigma_beta)
TestReport odrlt_beta_test(const Vector& beta_W, const Vector& sigma_beta_diag, Index n,
                           double alpha);
// delta_W / sqrt(Sigma_delta)
TestReport odrlt_delta_test(const Vector& delta_W, const Vector& sigma_delta_diag, double alpha);

// Debiased Lasso of the form x_b = x_hat + M D^T (y - D x_hat) / n for a
// design D, reporting the first `tested` coordinates with null variance
// sigma^2 [M S M^T]_jj, S = D^T D / n. Built once per design and reused across
// noise draws.
struct LassoDebiaser {
  Matrix design;
  ApproxInverse inverse;
  Vector variance_factor;  // [M S M^T]_jj for the tested coordinates
  Index tested = 0;
};

// Ignores mismatch: D = A, mu = 2 sqrt(log p / n).
LassoDebiaser baseline1_debiaser(const Matrix& A, const ApproxInverseSettings& s = {});
// Absorbs mismatch: D = (A | I_n), mu = 2 sqrt(log(n + p) / n), first p
// coordinates tested.
LassoDebiaser baseline2_debiaser(const Matrix& A, const ApproxInverseSettings& s = {});
Matrix augmented_design(const Matrix& A);

struct BaselineOutcome {
  TestReport report;
  Vector debiased;   // tested coordinates of x_b
  LassoFit fit;      // Lasso on (y, D)
};

BaselineOutcome debiased_lasso_test(const LassoDebiaser& d, const Vector& y, double lambda,
                                    double sigma, double alpha, TestKind kind);

BaselineOutcome baseline1_test(const Vector& y, const Matrix& A, double lambda, double sigma,
                               double alpha);
BaselineOutcome baseline2_test(const Vector& y, const Matrix& A, double lambda, double sigma,
                               double alpha);
// Same pipeline as baseline 1, on measurements taken with the correct matrix.
BaselineOutcome baseline3_test(const Vector& y_clean, const Matrix& A, double lambda,
                               double sigma, double alpha);

// Robust Lasso followed by both debiased tests for a given W.
struct DebiasedTests {
  Vector beta_W;
  Vector delta_W;
  TestReport beta;
  TestReport delta;
};

// DRLT when `odrlt` is false (W = A, variances from sigma and Sigma_A),
// ODRLT otherwise (variances from Sigma_beta and Sigma_delta of W).
DebiasedTests run_debiased_tests(const RobustLassoFit& fit, const Matrix& W, const Vector& y,
                                 const Matrix& A, const CovarianceDiagonals& cov, double sigma,
                                 double alpha, bool odrlt);

void write_report_csv(std::ostream& os, const TestReport& r);
std::string report_json(const TestReport& r);

}  // namespace drlt
