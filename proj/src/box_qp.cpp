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

#include "drlt/box_qp.hpp"

#include <limits>
#include <map>
#include <utility>

#include <Eigen/Cholesky>

namespace drlt {
namespace {

double interval_support(const Vector& lower, const Vector& upper, const Matrix& dy) {
  double s = 0.0;
  for (Index i = 0; i < dy.rows(); ++i) {
    const double d = dy(i, 0);
    if (d > 0.0) s += upper(i) * d;
    else if (d < 0.0) s += lower(i) * d;
  }
  return s;
}

class DenseProblem {
 public:
  explicit DenseProblem(const DenseBoxQp& qp) : qp_(qp) {
    KtK_ = Matrix::Zero(qp.dim(), qp.dim());
    for (const auto& b : qp.blocks) KtK_.noalias() += b.K.transpose() * b.K;
    if (qp.norm_cap) KtK_.diagonal().array() += 1.0;
  }

  int num_blocks() const { return static_cast<int>(qp_.blocks.size()) + (qp_.norm_cap ? 1 : 0); }
  Matrix initial() const { return Matrix::Zero(qp_.dim(), 1); }
  Matrix linear_term() const { return qp_.q; }
  bool is_cap(int k) const { return k == static_cast<int>(qp_.blocks.size()); }

  Matrix apply(int k, const Matrix& x) const {
    if (is_cap(k)) return x;
    return qp_.blocks[k].K * x;
  }
  Matrix adjoint(int k, const Matrix& y) const {
    if (is_cap(k)) return y;
    return qp_.blocks[k].K.transpose() * y;
  }
  Matrix quadratic(const Matrix& x) const { return qp_.P * x; }
  Matrix project(int k, const Matrix& v) const {
    if (is_cap(k)) {
      const double nv = v.norm();
      const double c = *qp_.norm_cap;
      return nv > c ? Matrix(v * (c / nv)) : v;
    }
    const auto& b = qp_.blocks[k];
    return v.col(0).cwiseMax(b.lower).cwiseMin(b.upper);
  }
  double support(int k, const Matrix& dy) const {
    if (is_cap(k)) return *qp_.norm_cap * dy.norm();
    return interval_support(qp_.blocks[k].lower, qp_.blocks[k].upper, dy);
  }
  Matrix solve(const Matrix& rhs, double rho, double sigma) const {
    const auto key = std::make_pair(rho, sigma);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      Matrix M = qp_.P + rho * KtK_;
      M.diagonal().array() += sigma;
      if (cache_.size() > 8) cache_.clear();
      it = cache_.emplace(key, Eigen::LDLT<Matrix>(M)).first;
    }
    return it->second.solve(rhs);
  }

 private:
  const DenseBoxQp& qp_;
  Matrix KtK_;
  mutable std::map<std::pair<double, double>, Eigen::LDLT<Matrix>> cache_;
};

static_assert(BoxQpProblem<DenseProblem>);

}  // namespace

void DenseBoxQp::validate() const {
  const Index d = P.rows();
  require_dims(P.cols() == d, "DenseBoxQp: P must be square");
  require_dims(q.size() == d, "DenseBoxQp: q length must match P");
  for (const auto& b : blocks) {
    require_dims(b.K.cols() == d, "DenseBoxQp: constraint map has wrong column count");
    require_dims(b.lower.size() == b.K.rows() && b.upper.size() == b.K.rows(),
                 "DenseBoxQp: bounds must match constraint rows");
    for (Index i = 0; i < b.lower.size(); ++i)
      if (b.lower(i) > b.upper(i)) throw DomainError("DenseBoxQp: lower bound exceeds upper bound");
  }
  if (norm_cap && !(*norm_cap >= 0.0)) throw DomainError("DenseBoxQp: norm cap must be non-negative");
}

double box_qp_violation(const DenseBoxQp& qp, const Vector& x) {
  double v = 0.0;
  for (const auto& b : qp.blocks) {
    const Vector kx = b.K * x;
    v = std::max(v, (kx - b.upper).cwiseMax(0.0).maxCoeff());
    v = std::max(v, (b.lower - kx).cwiseMax(0.0).maxCoeff());
  }
  if (qp.norm_cap) v = std::max(v, x.norm() - *qp.norm_cap);
  return std::max(v, 0.0);
}

QpSolution solve_box_qp(const DenseBoxQp& qp, const AdmmSettings& s) {
  qp.validate();
  DenseProblem pr(qp);
  const AdmmResult r = admm_solve(pr, s);
  QpSolution out;
  out.x = r.x.col(0);
  out.status = r.status;
  out.iterations = r.iterations;
  out.objective = 0.5 * out.x.dot(qp.P * out.x) + qp.q.dot(out.x);
  out.max_violation = box_qp_violation(qp, out.x);
  out.primal_residual = r.primal_residual;
  out.dual_residual = r.dual_residual;
  return out;
}

QpSolution solve_box_qp(const DenseBoxQp& qp, double tol, int max_iter) {
  AdmmSettings s;
  s.eps_abs = tol;
  s.eps_rel = tol;
  s.max_iter = max_iter;
  return solve_box_qp(qp, s);
}

}  // namespace drlt
