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

#include <algorithm>
#include <cmath>
#include <set>

#include "drlt/datagen.hpp"
#include "drlt/selection.hpp"
#include "helpers.hpp"

namespace drlt {
namespace {

TEST(LambdaGrid, DefaultRange) {
  const auto g = LambdaGrid::range();
  ASSERT_EQ(g.log_values.size(), 25u);
  EXPECT_DOUBLE_EQ(g.log_values.front(), 1.0);
  EXPECT_DOUBLE_EQ(g.log_values.back(), 7.0);
  EXPECT_NO_THROW(g.validate());
  LambdaGrid bad = g;
  bad.log_values = {2.0, 1.0};
  EXPECT_THROW(bad.validate(), DomainError);
  bad.log_values.clear();
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Folds, BalancedAndDeterministic) {
  const auto a = fold_labels(53, 10, 9), b = fold_labels(53, 10, 9);
  EXPECT_EQ(a, b);
  std::vector<int> count(10, 0);
  for (int f : a) ++count[std::size_t(f)];
  EXPECT_EQ(*std::max_element(count.begin(), count.end()) - *std::min_element(count.begin(), count.end()), 1);
  EXPECT_THROW(fold_labels(5, 10, 1), DomainError);
}

TEST(CvError, ExactFitIsZero) {
  const Matrix A = testing::random_sign_matrix(20, 4, 3);
  const Vector y = A * Vector::Zero(4);
  EXPECT_DOUBLE_EQ(cv_error(y, A, 1.0, 1.0, 5, 1), 0.0);
}

TEST(CvError, TwoFoldHandOracle) {
  const Matrix A = testing::random_sign_matrix(12, 3, 5);
  const Vector y = testing::random_normal_vector(12, 6, 2.0);
  const auto label = fold_labels(12, 2, 4);
  double expect = 0.0;
  for (int f = 0; f < 2; ++f) {
    std::vector<Index> tr, cv;
    for (Index i = 0; i < 12; ++i) (label[std::size_t(i)] == f ? cv : tr).push_back(i);
    const auto fit = robust_lasso(rows_of(y, tr), rows_of(A, tr), 0.5 / 12.0, 3.0 / 12.0);
    expect += (rows_of(y, cv) - rows_of(A, cv) * fit.beta_hat).squaredNorm();
  }
  EXPECT_NEAR(cv_error(y, A, 0.5, 3.0, 2, 4, 1e-6), expect / 2.0, 1e-8);
}

TEST(CvError, GridMatchesPointwise) {
  const Matrix A = testing::random_normal_matrix(30, 20, 7);
  const Vector y = A * testing::sparse_vector(20, {{3, 5.0}}) + testing::random_normal_vector(30, 8);
  const std::vector<double> v{0.5, 2.0, 8.0};
  const Matrix grid = cv_error_grid(y, A, v, 5, 2, 1e-9);
  for (Index i = 0; i < 3; ++i)
    for (Index k = 0; k < 3; ++k)
      EXPECT_NEAR(grid(i, k), cv_error(y, A, v[std::size_t(i)], v[std::size_t(k)], 5, 2, 1e-9),
                  1e-6 * (1.0 + grid(i, k)));
  const Matrix loose = cv_error_grid(y, A, v, 5, 2);
  EXPECT_LT((loose - grid).cwiseAbs().maxCoeff(), 1e-2 * (1.0 + grid.maxCoeff()));
}

TEST(SelectLambdas, NoiselessPicksGridMinimum) {
  GenParams g;
  g.p = 40;
  g.n = 30;
  g.f_sp = 0.05;
  g.f_adv = 0.0;
  g.f_sigma = 0.0;
  const auto inst = gen_instance(g);
  const Matrix& A = inst.A.entries();
  auto grid = LambdaGrid::range(-4.0, 2.0, 2.0);
  grid.gate_fraction = 0.0;
  grid.gate_redraws = 5;
  grid.folds = 5;
  const auto cov = covariance_diagonals(A, A, 1.0);
  Rng noise(3);
  GateContext ctx{&A, &cov, [&](int) { return Vector(inst.y.values + gen_noise(30, 1.0, noise)); }};
  const auto sel = select_lambdas(inst.y.values, A, ctx, grid, 11);
  const Matrix err = cv_error_grid(inst.y.values, A, grid.values(), 5, 11);
  EXPECT_DOUBLE_EQ(sel.cv_error, err.minCoeff());
  EXPECT_LT(sel.cv_error, 1e-3 * inst.y.values.squaredNorm());
  EXPECT_FALSE(sel.fallback);
  EXPECT_EQ(sel.trace.size(), 16u);
  const auto again = select_lambdas(inst.y.values, A, ctx, grid, 11);
  EXPECT_EQ(sel.lambda1, again.lambda1);
  EXPECT_EQ(sel.lambda2, again.lambda2);
}

TEST(SelectLambdas, SinglePairAndFallback) {
  const Matrix A = testing::random_sign_matrix(20, 30, 2);
  const Vector y = testing::random_normal_vector(20, 3);
  LambdaGrid grid;
  grid.log_values = {0.5};
  grid.gate_redraws = 20;
  grid.folds = 4;
  const auto cov = covariance_diagonals(A, A, 1.0);
  Rng noise(3);
  GateContext ctx{&A, &cov, [&](int) { return gen_noise(20, 1.0, noise); }};
  grid.gate_fraction = 0.0;
  auto sel = select_lambdas(y, A, ctx, grid, 1);
  EXPECT_DOUBLE_EQ(sel.lambda1, std::exp(0.5));
  EXPECT_FALSE(sel.fallback);
  grid.gate_fraction = 1.0;
  grid.gate_alpha = 0.15;
  sel = select_lambdas(y, A, ctx, grid, 1);
  EXPECT_TRUE(sel.fallback);
  EXPECT_DOUBLE_EQ(sel.lambda2, std::exp(0.5));
}

TEST(Youden, Examples) {
  EXPECT_DOUBLE_EQ(youden_threshold({0.1, 0.9}, {false, true}), 0.5);
  EXPECT_DOUBLE_EQ(youden_threshold({2.0, 2.0, 2.0}, {false, true, false}), 2.0);
  EXPECT_THROW(youden_threshold({1.0, 2.0}, {true, true}), DomainError);
}

TEST(Youden, ExhaustiveOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    std::vector<double> s;
    std::vector<bool> t;
    for (int k = 0; k < 20; ++k) {
      s.push_back(std::round(rng.normal() * 4.0) / 4.0);
      t.push_back(k % 3 == 0);
    }
    const double tau = youden_threshold(s, t);
    const double j = youden_index(s, t, tau);
    // Every possible partition score >= c for c a sample value or +inf.
    double best = youden_index(s, t, 1e300);
    for (double c : s) best = std::max(best, youden_index(s, t, c));
    EXPECT_NEAR(j, best, 1e-12);
    for (double c : s)
      if (youden_index(s, t, c) == j) EXPECT_LE(tau, c + 1e-12);
  }
}

TEST(Ransac, NoiselessRecovery) {
  const Matrix A = testing::random_normal_matrix(30, 6, 4);
  const Vector beta = testing::sparse_vector(6, {{1, 3.0}, {4, -2.0}});
  RansacConfig cfg;
  cfg.subsets = 5;
  Rng rng(2);
  const auto r = ransac_fit(A * beta, A, cfg, 1e-6, rng);
  EXPECT_GE(r.consensus.size(), 6u);
  EXPECT_LT((r.beta - beta).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Ransac, SingleSubsetFullData) {
  const Matrix A = testing::random_sign_matrix(15, 5, 8);
  const Vector y = testing::random_normal_vector(15, 9);
  RansacConfig cfg;
  cfg.subsets = 1;
  cfg.subset_fraction = 1.0;
  Rng rng(1);
  const auto r = ransac_fit(y, A, cfg, 0.5, rng);
  EXPECT_EQ(r.consensus.size(), 15u);
  EXPECT_EQ(r.beta, fit_l2(y, A, 0.5).beta);
  cfg.subset_fraction = 0.9;
  EXPECT_EQ(ransac_fit(y, A, cfg, 0.5, rng).consensus.size(), 15u);
  cfg.subsets = 0;
  EXPECT_THROW(ransac_fit(y, A, cfg, 0.5, rng), DomainError);
}

TEST(Ransac, ExcludesGrossOutlier) {
  int excluded = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Matrix A = testing::random_normal_matrix(10, 4, 100 + seed);
    Vector y = A * testing::sparse_vector(4, {{0, 2.0}, {2, -1.0}}) + testing::random_normal_vector(10, 200 + seed, 0.01);
    y(3) += 50.0;
    RansacConfig cfg;
    cfg.subsets = 40;
    Rng rng(seed);
    const auto r = ransac_fit(y, A, cfg, 1e-4, rng);
    excluded += std::find(r.consensus.begin(), r.consensus.end(), Index{3}) == r.consensus.end();
  }
  EXPECT_GE(excluded, 38);
}

}  // namespace
}  // namespace drlt
