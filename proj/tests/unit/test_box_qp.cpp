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

#include <limits>

#include "drlt/box_qp.hpp"
#include "helpers.hpp"

namespace drlt {
namespace {

DenseBoxQp identity_box(Index d, const Vector& lo, const Vector& hi) {
  DenseBoxQp qp;
  qp.P = 2.0 * Matrix::Identity(d, d);
  qp.q = Vector::Zero(d);
  qp.blocks.push_back({Matrix::Identity(d, d), lo, hi});
  return qp;
}

TEST(BoxQp, ShrinkTowardZeroInsideBox) {
  const double mu = 0.3;
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  const auto sol = solve_box_qp(identity_box(4, e1.array() - mu, e1.array() + mu), 1e-9, 20000);
  EXPECT_EQ(sol.status, QpStatus::solved);
  EXPECT_LT((sol.x - (1.0 - mu) * e1).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(sol.max_violation, 1e-8);
}

TEST(BoxQp, FeasibleZero) {
  const auto sol = solve_box_qp(identity_box(3, Vector::Constant(3, -1.0), Vector::Constant(3, 2.0)));
  EXPECT_EQ(sol.status, QpStatus::solved);
  EXPECT_LT(sol.x.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(BoxQp, DetectsInfeasibility) {
  DenseBoxQp qp;
  qp.P = Matrix::Identity(1, 1);
  qp.q = Vector::Zero(1);
  const double inf = std::numeric_limits<double>::infinity();
  qp.blocks.push_back({Matrix::Identity(1, 1), Vector::Constant(1, -inf), Vector::Constant(1, -1.0)});
  qp.blocks.push_back({Matrix::Identity(1, 1), Vector::Constant(1, 1.0), Vector::Constant(1, inf)});
  const auto sol = solve_box_qp(qp);
  EXPECT_EQ(sol.status, QpStatus::primal_infeasible);
}

TEST(BoxQp, NormCap) {
  DenseBoxQp qp;
  qp.P = Matrix::Identity(2, 2);
  qp.q = Vector(2);
  qp.q << -3.0, -4.0;
  qp.norm_cap = 1.0;
  const auto sol = solve_box_qp(qp, 1e-9, 20000);
  EXPECT_NEAR(sol.x(0), 0.6, 1e-6);
  EXPECT_NEAR(sol.x(1), 0.8, 1e-6);
}

double active_set_oracle(const DenseBoxQp& qp) {
  const auto& b = qp.blocks[0];
  const Index m = b.K.rows(), d = qp.dim();
  double best = std::numeric_limits<double>::infinity();
  int patterns = 1;
  for (Index i = 0; i < m; ++i) patterns *= 3;
  for (int code = 0; code < patterns; ++code) {
    std::vector<Index> rows;
    std::vector<double> rhs;
    int c = code;
    for (Index i = 0; i < m; ++i, c /= 3) {
      if (c % 3 == 1) rows.push_back(i), rhs.push_back(b.lower(i));
      if (c % 3 == 2) rows.push_back(i), rhs.push_back(b.upper(i));
    }
    const Index k = static_cast<Index>(rows.size());
    if (k > d) continue;
    Matrix kkt = Matrix::Zero(d + k, d + k);
    Vector r(d + k);
    kkt.topLeftCorner(d, d) = qp.P;
    r.head(d) = -qp.q;
    for (Index t = 0; t < k; ++t) {
      kkt.block(0, d + t, d, 1) = b.K.row(rows[t]).transpose();
      kkt.block(d + t, 0, 1, d) = b.K.row(rows[t]);
      r(d + t) = rhs[t];
    }
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (lu.rank() < d + k) continue;
    const Vector x = lu.solve(r).head(d);
    if (box_qp_violation(qp, x) > 1e-10) continue;
    best = std::min(best, 0.5 * x.dot(qp.P * x) + qp.q.dot(x));
  }
  return best;
}

TEST(BoxQp, MatchesActiveSetEnumeration) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Matrix G = testing::random_normal_matrix(3, 3, seed);
    DenseBoxQp qp;
    qp.P = G * G.transpose() + 0.5 * Matrix::Identity(3, 3);
    qp.q = testing::random_normal_vector(3, seed + 10, 3.0);
    const Matrix K = testing::random_normal_matrix(4, 3, seed + 20);
    qp.blocks.push_back({K, Vector::Constant(4, -0.7), Vector::Constant(4, 0.4)});
    const double oracle = active_set_oracle(qp);
    const auto sol = solve_box_qp(qp, 1e-10, 50000);
    EXPECT_EQ(sol.status, QpStatus::solved) << seed;
    EXPECT_LE(sol.max_violation, 1e-7) << seed;
    EXPECT_NEAR(sol.objective, oracle, 1e-6 * std::max(1.0, std::abs(oracle))) << seed;
  }
}

TEST(BoxQp, ValidatesShapes) {
  DenseBoxQp qp;
  qp.P = Matrix::Identity(2, 2);
  qp.q = Vector::Zero(3);
  EXPECT_THROW(solve_box_qp(qp), DimensionError);
  qp.q = Vector::Zero(2);
  qp.blocks.push_back({Matrix::Identity(2, 2), Vector::Constant(2, 1.0), Vector::Constant(2, 0.0)});
  EXPECT_THROW(solve_box_qp(qp), DomainError);
}

}  // namespace
}  // namespace drlt
