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
#include <vector>

#include "drlt/kernels.hpp"
#include "drlt/rng.hpp"
#include "drlt/stats.hpp"
#include "helpers.hpp"

namespace drlt {
namespace {

double bisect_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(NormalQuantile, MatchesBisectionOracle) {
  for (double p : {1e-12, 1e-6, 0.001, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.995, 0.999999}) {
    EXPECT_NEAR(normal_quantile(p), bisect_quantile(p), 1e-9) << p;
  }
}

TEST(NormalQuantile, KnownValues) {
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(normal_quantile(1.0 - 0.01 / 2.0), 2.5758293035489, 1e-9);
  EXPECT_NEAR(normal_quantile(0.8413447460685429), 1.0, 1e-9);
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(NormalCdf, Values) {
  EXPECT_NEAR(normal_cdf(1.0), 0.841344746068543, 1e-14);
  EXPECT_NEAR(normal_cdf(-1.96), 0.0249978951482204, 1e-14);
}

TEST(Lilliefors, StatisticAgainstDirectOracle) {
  std::vector<double> x = {0.3, -1.2, 0.8, 2.1, -0.4, 0.05, 1.1};
  double mean = 0, ss = 0;
  for (double v : x) mean += v;
  mean /= x.size();
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (x.size() - 1));
  double d = 0.0;
  for (double v : x) {
    const double f = normal_cdf((v - mean) / sd);
    int below = 0, at_or_below = 0;
    for (double w : x) {
      below += w < v;
      at_or_below += w <= v;
    }
    d = std::max({d, at_or_below / double(x.size()) - f, f - below / double(x.size())});
  }
  EXPECT_NEAR(lilliefors_statistic(x), d, 1e-15);
}

TEST(Lilliefors, CriticalValuesNearPublishedTable) {
  EXPECT_NEAR(lilliefors_critical_value(20, 0.05), 0.190, 0.005);
  EXPECT_NEAR(lilliefors_critical_value(20, 0.01), 0.231, 0.01);
  EXPECT_NEAR(lilliefors_critical_value(30, 0.05), 0.159, 0.005);
  EXPECT_NEAR(lilliefors_critical_value(20, 0.10), 0.173, 0.005);
  EXPECT_NEAR(lilliefors_critical_value(20, 0.15), 0.166, 0.005);
  EXPECT_GT(lilliefors_critical_value(50, 0.01), lilliefors_critical_value(50, 0.05));
  EXPECT_GT(lilliefors_critical_value(100, 0.05), lilliefors_critical_value(1000, 0.05));
  EXPECT_THROW(lilliefors_critical_value(4, 0.05), DomainError);
  EXPECT_THROW(lilliefors_critical_value(30, 0.2), DomainError);
}

TEST(Lilliefors, SizeOnNormalSamples) {
  int pass = 0;
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    Rng rng(77, {static_cast<std::uint64_t>(r)});
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.normal();
    pass += lilliefors_test(x, 0.01).normal;
  }
  const double rate = pass / double(reps);
  EXPECT_GT(rate, 0.97);
}

TEST(Lilliefors, PowerOnUniformSamples) {
  int reject = 0;
  for (int r = 0; r < 200; ++r) {
    Rng rng(78, {static_cast<std::uint64_t>(r)});
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.uniform();
    reject += !lilliefors_test(x, 0.01).normal;
  }
  EXPECT_GE(reject / 200.0, 0.99);
}

TEST(Lilliefors, Degenerate) {
  std::vector<double> c(10, 3.0);
  EXPECT_THROW(lilliefors_statistic(c), DomainError);
  std::vector<double> small = {1, 2, 3};
  EXPECT_THROW(lilliefors_statistic(small), DomainError);
}

TEST(Kernels, SerialAndParallelAgree) {
  const Matrix m = testing::random_normal_matrix(37, 23, 4);
  EXPECT_EQ(kernels::serial::row_sq_norms(m), kernels::parallel::row_sq_norms(m));
  EXPECT_EQ(kernels::serial::col_sq_norms(m), kernels::parallel::col_sq_norms(m));
  const Matrix c = testing::random_normal_matrix(37, 23, 5);
  EXPECT_EQ(kernels::serial::box_violation(m, c, 0.5), kernels::parallel::box_violation(m, c, 0.5));
  const Matrix sq = testing::random_normal_matrix(20, 20, 6);
  EXPECT_EQ(kernels::serial::box_violation_diag(sq, 1.0, 0.2),
            kernels::parallel::box_violation_diag(sq, 1.0, 0.2));
  const Matrix design = testing::random_sign_matrix(50, 8, 7);
  const Vector y = testing::random_normal_vector(50, 8);
  const Matrix fits = testing::random_normal_matrix(8, 12, 9);
  EXPECT_EQ(kernels::serial::nearest_model(design, y, fits),
            kernels::parallel::nearest_model(design, y, fits));
  const Matrix samples = testing::random_normal_matrix(100, 15, 10);
  EXPECT_EQ(kernels::serial::lilliefors_columns(samples),
            kernels::parallel::lilliefors_columns(samples));
}

TEST(Kernels, ReferenceValues) {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  EXPECT_EQ(kernels::serial::row_sq_norms(m), Vector((Vector(2) << 5, 25).finished()));
  EXPECT_EQ(kernels::serial::col_sq_norms(m), Vector((Vector(2) << 10, 20).finished()));
  EXPECT_DOUBLE_EQ(kernels::serial::box_violation(m, Matrix::Zero(2, 2), 3.5), 0.5);
  EXPECT_DOUBLE_EQ(kernels::serial::box_violation_diag(m, 1.0, 2.5), 0.5);
}

TEST(Kernels, NearestModelTiesToLowestIndex) {
  Matrix design(1, 1);
  design << 1.0;
  Vector y(1);
  y << 1.0;
  Matrix fits(1, 3);
  fits << 2.0, 0.0, 2.0;
  EXPECT_EQ(kernels::serial::nearest_model(design, y, fits), std::vector<Index>{0});
}

TEST(Kernels, LillieforsColumnsConstantColumnIsInfinite) {
  Matrix s = testing::random_normal_matrix(20, 2, 3);
  s.col(1).setConstant(2.0);
  const Vector d = kernels::lilliefors_columns(s);
  EXPECT_TRUE(std::isinf(d(1)));
  EXPECT_THROW(kernels::lilliefors_columns(Matrix::Zero(4, 2)), DomainError);
}

}  // namespace
}  // namespace drlt
