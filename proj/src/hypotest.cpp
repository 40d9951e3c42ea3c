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

#include "drlt/hypotest.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "drlt/kernels.hpp"

namespace drlt {

const char* to_string(TestKind k) {
  switch (k) {
    case TestKind::drlt_beta: return "drlt_beta";
    case TestKind::drlt_delta: return "drlt_delta";
    case TestKind::odrlt_beta: return "odrlt_beta";
    case TestKind::odrlt_delta: return "odrlt_delta";
    case TestKind::baseline1: return "baseline1";
    case TestKind::baseline2: return "baseline2";
    case TestKind::baseline3: return "baseline3";
  }
  return "unknown";
}

std::vector<bool> TestReport::decide(const Vector& statistics, double threshold) {
  std::vector<bool> d(static_cast<std::size_t>(statistics.size()));
  for (Index k = 0; k < statistics.size(); ++k)
    d[static_cast<std::size_t>(k)] = std::abs(statistics(k)) > threshold;
  return d;
}

Index TestReport::rejections() const {
  Index c = 0;
  for (bool b : decisions) c += b;
  return c;
}

double z_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("z_quantile: alpha must lie in (0, 1)");
  return -normal_quantile(alpha / 2.0);
}

TestReport make_report(Vector statistics, double alpha, TestKind kind) {
  TestReport r;
  r.threshold = z_quantile(alpha);
  r.alpha = alpha;
  r.test_kind = kind;
  r.decisions = TestReport::decide(statistics, r.threshold);
  r.statistics = std::move(statistics);
  return r;
}

namespace {

Vector scaled_statistics(const Vector& est, const Vector& variance, double scale, const char* who) {
  require_dims(est.size() == variance.size(), std::string(who) + ": variance length mismatch");
  Vector s(est.size());
  for (Index k = 0; k < est.size(); ++k) {
    if (!(variance(k) > 0.0)) throw DomainError(std::string(who) + ": variance must be positive");
    s(k) = scale * est(k) / std::sqrt(variance(k));
  }
  return s;
}

}  // namespace

TestReport drlt_beta_test(const Vector& beta_W, double sigma, Index n, double alpha) {
  if (!(sigma > 0.0)) throw DomainError("drlt_beta_test: sigma must be positive");
  const Vector var = Vector::Constant(beta_W.size(), sigma * sigma);
  return make_report(scaled_statistics(beta_W, var, std::sqrt(double(n)), "drlt_beta_test"), alpha,
                     TestKind::drlt_beta);
}

TestReport drlt_delta_test(const Vector& delta_W, const Vector& sigma_A_diag, double sigma,
                           double alpha) {
  if (!(sigma > 0.0)) throw DomainError("drlt_delta_test: sigma must be positive");
  if (sigma_A_diag.size() && !(sigma_A_diag.minCoeff() > 0.0))
    throw DomainError("drlt_delta_test: Sigma_A has a zero diagonal entry");
  const Vector var = sigma * sigma * sigma_A_diag;
  return make_report(scaled_statistics(delta_W, var, 1.0, "drlt_delta_test"), alpha,
                     TestKind::drlt_delta);
}

TestReport odrlt_beta_test(const Vector& beta_W, const Vector& sigma_beta_diag, Index n,
                           double alpha) {
  return make_report(scaled_statistics(beta_W, sigma_beta_diag, std::sqrt(double(n)), "odrlt_beta_test"),
                     alpha, TestKind::odrlt_beta);
}

TestReport odrlt_delta_test(const Vector& delta_W, const Vector& sigma_delta_diag, double alpha) {
  return make_report(scaled_statistics(delta_W, sigma_delta_diag, 1.0, "odrlt_delta_test"), alpha,
                     TestKind::odrlt_delta);
}

Matrix augmented_design(const Matrix& A) {
  Matrix D(A.rows(), A.cols() + A.rows());
  D << A, Matrix::Identity(A.rows(), A.rows());
  return D;
}

namespace {

LassoDebiaser make_debiaser(Matrix D, double mu, Index tested, const ApproxInverseSettings& s) {
  LassoDebiaser d;
  d.inverse = build_M(D, mu, s, tested);
  d.tested = tested;
  const double n = static_cast<double>(D.rows());
  // [M S M^T]_jj = ||D m_j||^2 / n
  const Matrix DMt = D * d.inverse.M.topRows(tested).transpose();
  d.variance_factor = kernels::col_sq_norms(DMt) / n;
  d.design = std::move(D);
  return d;
}

}  // namespace

LassoDebiaser baseline1_debiaser(const Matrix& A, const ApproxInverseSettings& s) {
  const double n = double(A.rows()), p = double(A.cols());
  return make_debiaser(A, 2.0 * std::sqrt(std::log(p) / n), A.cols(), s);
}

LassoDebiaser baseline2_debiaser(const Matrix& A, const ApproxInverseSettings& s) {
  const double n = double(A.rows()), p = double(A.cols());
  return make_debiaser(augmented_design(A), 2.0 * std::sqrt(std::log(n + p) / n), A.cols(), s);
}

BaselineOutcome debiased_lasso_test(const LassoDebiaser& d, const Vector& y, double lambda,
                                    double sigma, double alpha, TestKind kind) {
  if (!(sigma > 0.0)) throw DomainError("debiased_lasso_test: sigma must be positive");
  require_dims(y.size() == d.design.rows(), "debiased_lasso_test: y length mismatch");
  BaselineOutcome out;
  out.fit = lasso_l2(y, d.design, lambda);
  const double n = static_cast<double>(d.design.rows());
  const Vector r = y - d.design * out.fit.beta;
  const Vector g = d.design.transpose() * r / n;
  out.debiased = out.fit.beta.head(d.tested) + d.inverse.M.topRows(d.tested) * g;
  const Vector var = sigma * sigma * d.variance_factor;
  out.report = make_report(scaled_statistics(out.debiased, var, std::sqrt(n), to_string(kind)), alpha, kind);
  return out;
}

BaselineOutcome baseline1_test(const Vector& y, const Matrix& A, double lambda, double sigma,
                               double alpha) {
  return debiased_lasso_test(baseline1_debiaser(A), y, lambda, sigma, alpha, TestKind::baseline1);
}

BaselineOutcome baseline2_test(const Vector& y, const Matrix& A, double lambda, double sigma,
                               double alpha) {
  return debiased_lasso_test(baseline2_debiaser(A), y, lambda, sigma, alpha, TestKind::baseline2);
}

BaselineOutcome baseline3_test(const Vector& y_clean, const Matrix& A, double lambda,
                               double sigma, double alpha) {
  return debiased_lasso_test(baseline1_debiaser(A), y_clean, lambda, sigma, alpha, TestKind::baseline3);
}

DebiasedTests run_debiased_tests(const RobustLassoFit& fit, const Matrix& W, const Vector& y,
                                 const Matrix& A, const CovarianceDiagonals& cov, double sigma,
                                 double alpha, bool odrlt) {
  DebiasedTests t;
  t.beta_W = debias_beta(fit, W, y, A);
  t.delta_W = debias_delta(fit, W, y, A);
  if (odrlt) {
    t.beta = odrlt_beta_test(t.beta_W, cov.sigma_beta, A.rows(), alpha);
    t.delta = odrlt_delta_test(t.delta_W, cov.sigma_delta, alpha);
  } else {
    t.beta = drlt_beta_test(t.beta_W, sigma, A.rows(), alpha);
    t.delta = drlt_delta_test(t.delta_W, cov.sigma_A, sigma, alpha);
  }
  return t;
}

void write_report_csv(std::ostream& os, const TestReport& r) {
  os << "coordinate,statistic,decision\n";
  std::ostringstream line;
  line.precision(17);
  for (Index k = 0; k < r.statistics.size(); ++k)
    line << k << ',' << r.statistics(k) << ',' << (r.decisions[std::size_t(k)] ? 1 : 0) << '\n';
  os << line.str();
}

std::string report_json(const TestReport& r) {
  nlohmann::json j;
  j["test_kind"] = to_string(r.test_kind);
  j["alpha"] = r.alpha;
  j["threshold"] = r.threshold;
  j["statistics"] = std::vector<double>(r.statistics.data(), r.statistics.data() + r.statistics.size());
  std::vector<int> d;
  for (bool b : r.decisions) d.push_back(b);
  j["decisions"] = d;
  return j.dump();
}

}  // namespace drlt
