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

#include <gtest/gtest.h>

#include <cmath>

#include "drlt/datagen.hpp"
#include "drlt/hypotest.hpp"
#include "helpers.hpp"

namespace drlt {
namespace {

// Bisection on erfc, independent of the rational approximation.
double z_oracle(double alpha) {
  double lo = 0.0, hi = 40.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > alpha / 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(ZQuantile, Examples) {
  EXPECT_NEAR(z_quantile(0.3173), 1.0, 1e-4);
  EXPECT_NEAR(z_quantile(0.01), 2.5758293035489, 1e-8);
  EXPECT_NEAR(z_quantile(1.0 - 1e-12), 0.0, 1e-8);
  for (double a : {1e-10, 1e-4, 0.05, 0.2, 0.5, 0.9}) EXPECT_NEAR(z_quantile(a), z_oracle(a), 1e-8) << a;
  EXPECT_THROW(z_quantile(0.0), DomainError);
  EXPECT_THROW(z_quantile(1.0), DomainError);
}

TEST(DrltBeta, Examples) {
  const double sigma = 3.0;
  const Index n = 100;
  auto r = drlt_beta_test(Vector::Zero(5), sigma, n, 0.01);
  EXPECT_EQ(r.rejections(), 0);
  Vector b = Vector::Zero(5);
  b(2) = 10.0 * sigma / std::sqrt(double(n));
  r = drlt_beta_test(b, sigma, n, 0.01);
  EXPECT_NEAR(r.statistics(2), 10.0, 1e-12);
  EXPECT_TRUE(r.decisions[2]);
  EXPECT_EQ(r.rejections(), 1);
  EXPECT_EQ(r.test_kind, TestKind::drlt_beta);
  EXPECT_THROW(drlt_beta_test(b, 0.0, n, 0.01), DomainError);
}

TEST(DrltDelta, StrictThreshold) {
  const double z = z_quantile(0.05);
  Vector d(3);
  d << z * 2.0, -z * 2.0 * 1.0000001, 0.0;
  const Vector sa = Vector::Constant(3, 4.0);
  const auto r = drlt_delta_test(d, sa, 1.0, 0.05);
  EXPECT_FALSE(r.decisions[0]);
  EXPECT_TRUE(r.decisions[1]);
  EXPECT_FALSE(r.decisions[2]);
  Vector bad = sa;
  bad(1) = 0.0;
  EXPECT_THROW(drlt_delta_test(d, bad, 1.0, 0.05), DomainError);
}

TEST(Odrlt, ReducesToDrltWithIdentityWeights) {
  const Matrix A = testing::random_sign_matrix(40, 90, 6);
  const Vector y = testing::random_normal_vector(40, 7, 5.0);
  const auto fit = robust_lasso(y, A, 0.5, 0.2);
  for (double sigma : {0.1, 0.3, 1.7, 123.456}) {
    const auto cov = covariance_diagonals(A, A, sigma);
    const auto d = run_debiased_tests(fit, A, y, A, cov, sigma, 0.01, false);
    const auto o = run_debiased_tests(fit, A, y, A, cov, sigma, 0.01, true);
    for (Index j = 0; j < 90; ++j) EXPECT_EQ(d.beta.statistics(j), o.beta.statistics(j));
    for (Index i = 0; i < 40; ++i) EXPECT_EQ(d.delta.statistics(i), o.delta.statistics(i));
    EXPECT_EQ(d.beta.decisions, o.beta.decisions);
  }
  EXPECT_THROW(odrlt_beta_test(Vector::Ones(3), Vector::Zero(3), 10, 0.01), DomainError);
}

TEST(TestReport, DecisionsRecomputable) {
  const Vector s = testing::random_normal_vector(200, 3, 2.0);
  const auto r = make_report(s, 0.05, TestKind::odrlt_delta);
  EXPECT_EQ(r.decisions, TestReport::decide(r.statistics, r.threshold));
  for (Index k = 0; k < s.size(); ++k) EXPECT_EQ(r.decisions[std::size_t(k)], std::abs(s(k)) > r.threshold);
}

TEST(Drlt, NullSize) {
  // beta* = 0, delta* = 0: per-coordinate rejection rate near alpha.
  const Index n = 60, p = 120;
  const Matrix A = testing::random_sign_matrix(n, p, 21);
  const double sigma = 1.0, alpha = 0.05;
  const auto cov = covariance_diagonals(A, A, sigma);
  Rng rng(5);
  Index rej = 0, total = 0;
  for (int run = 0; run < 400; ++run) {
    const Vector y = gen_noise(n, sigma, rng);
    const auto fit = robust_lasso(y, A, 4.0 * sigma * std::sqrt(std::log(double(p)) / n), 4.0 * sigma * std::sqrt(std::log(double(n))) / n);
    const auto t = run_debiased_tests(fit, A, y, A, cov, sigma, alpha, false);
    rej += t.beta.rejections();
    total += p;
  }
  const double rate = double(rej) / double(total);
  EXPECT_LT(std::abs(rate - alpha), 3.0 * std::sqrt(alpha * (1 - alpha) / double(total)) + 0.01);
}

TEST(Baselines, AugmentedGram) {
  const Matrix A = testing::random_sign_matrix(8, 12, 2);
  const Matrix D = augmented_design(A);
  const Matrix S = D.transpose() * D / 8.0;
  for (Index j = 0; j < 12; ++j) EXPECT_DOUBLE_EQ(S(j, j), 1.0);
  EXPECT_LT((S.bottomRightCorner(8, 8) - Matrix::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((S.topRightCorner(12, 8) - A.transpose() / 8.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Baselines, IdentityFallbackStatistic) {
  const Index n = 20, p = 40;
  const Matrix A = testing::random_sign_matrix(n, p, 3);
  LassoDebiaser d;
  d.design = A;
  d.inverse.M = Matrix::Identity(p, p);
  d.tested = p;
  d.variance_factor = (A.transpose() * A / double(n)).diagonal();
  const Vector y = testing::random_normal_vector(n, 4, 3.0);
  const auto out = debiased_lasso_test(d, y, 0.3, 2.0, 0.01, TestKind::baseline1);
  const Vector expect = std::sqrt(double(n)) * out.debiased / 2.0;
  EXPECT_LT((out.report.statistics - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Baselines, NoiselessRecovery) {
  GenParams g;
  g.p = 60;
  g.n = 50;
  g.f_sp = 0.05;
  g.f_adv = 0.0;
  g.f_sigma = 0.0;
  const auto inst = gen_instance(g);
  const auto out = baseline3_test(inst.y.values, inst.A.entries(), 1e-3, 1.0, 0.01);
  const auto mask = inst.beta_star.support_mask();
  for (Index j = 0; j < 60; ++j) EXPECT_EQ(out.report.decisions[std::size_t(j)], bool(mask[std::size_t(j)])) << j;
  const auto strict = baseline3_test(inst.y.values, inst.A.entries(), 1e-3, 1.0, 1e-6);
  EXPECT_LE(strict.report.rejections(), out.report.rejections());
}

TEST(Baselines, Baseline2TestsOnlyBeta) {
  Rng rng(4);
  const Matrix A = gen_pooling(30, 50, rng).second.entries();
  const Vector y = testing::random_normal_vector(30, 8, 1.0);
  const auto out = baseline2_test(y, A, 0.1, 1.0, 0.01);
  EXPECT_EQ(out.report.statistics.size(), 50);
  EXPECT_EQ(out.fit.beta.size(), 80);
  EXPECT_EQ(out.report.test_kind, TestKind::baseline2);
}

TEST(TestReport, Serialisation) {
  Vector s(2);
  s << 3.0, -0.5;
  const auto r = make_report(s, 0.01, TestKind::baseline1);
  std::ostringstream os;
  write_report_csv(os, r);
  EXPECT_EQ(os.str(), "coordinate,statistic,decision\n0,3,1\n1,-0.5,0\n");
  EXPECT_NE(report_json(r).find("\"test_kind\":\"baseline1\""), std::string::npos);
}

}  // namespace
}  // namespace drlt
