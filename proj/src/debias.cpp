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

#include "drlt/debias.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "drlt/kernels.hpp"

namespace drlt {
namespace {

double box_support(const Matrix& center, double radius, const Matrix& dy) {
  return (center.array() * dy.array()).sum() + radius * dy.cwiseAbs().sum();
}

// Row-wise approximate-inverse QP, batched over rows, in the eigenbasis of S = V diag(lam) V^T:
// X = M V, so that M S = X diag(lam) V^T and tr(M S M^T) = sum_j lam_j ||x_.j||^2.
class ApproxInverseProblem {
 public:
  ApproxInverseProblem(const Vector& lam, const Matrix& V, Index rows, double mu)
      : lam_(lam), V_(V), rows_(rows) {
    scale_ = mu > 0.0 ? 1.0 / mu : 1.0;
    radius_ = mu > 0.0 ? 1.0 : 0.0;
    center_ = Matrix::Zero(rows, lam.size());
    for (Index r = 0; r < rows; ++r) center_(r, r) = scale_;
  }

  int num_blocks() const { return 1; }
  Matrix initial() const { return Matrix::Zero(rows_, lam_.size()); }
  Matrix linear_term() const { return Matrix(); }
  Matrix apply(int, const Matrix& x) const {
    return scale_ * (x * lam_.asDiagonal()) * V_.transpose();
  }
  Matrix adjoint(int, const Matrix& y) const { return scale_ * (y * V_) * lam_.asDiagonal(); }
  Matrix quadratic(const Matrix& x) const { return 2.0 * (x * lam_.asDiagonal()); }
  Matrix project(int, const Matrix& v) const {
    return v.array().max(center_.array() - radius_).min(center_.array() + radius_).matrix();
  }
  double support(int, const Matrix& dy) const { return box_support(center_, radius_, dy); }
  Matrix solve(const Matrix& rhs, double rho, double sigma) const {
    const Vector d = (2.0 * lam_.array() + rho * scale_ * scale_ * lam_.array().square() + sigma)
                         .inverse()
                         .matrix();
    return rhs * d.asDiagonal();
  }

 private:
  Vector lam_;
  Matrix V_;
  Index rows_;
  double scale_ = 1.0;
  double radius_ = 1.0;
  Matrix center_;
};

static_assert(BoxQpProblem<ApproxInverseProblem>);

double row_violation(const Matrix& MS, Index r, double mu) {
  double v = 0.0;
  for (Index j = 0; j < MS.cols(); ++j) v = std::max(v, std::abs(MS(r, j) - (j == r ? 1.0 : 0.0)));
  return std::max(v - mu, 0.0);
}

struct Block {
  double scale = 1.0;
  double radius = 1.0;
};

Block make_block(double base_scale, double mu) {
  if (mu > 0.0) return {base_scale / mu, 1.0};
  return {base_scale, 0.0};
}

// Weight-design QP in the original coordinates. The x-step diagonalises in the
// rotated variable U^T W V with A A^T = U diag(g) U^T, A^T A = V diag(e) V^T.
class DesignProblem {
 public:
  DesignProblem(const Matrix& A, const Matrix& S, const Matrix& U, const Vector& g, const Matrix& V,
                const Vector& e, const DesignLevels& lv)
      : A_(A), S_(S), U_(U), g_(g), V_(V), e_(e) {
    const double n = static_cast<double>(A.rows());
    const double p = static_cast<double>(A.cols());
    b1_ = make_block(1.0 / n, lv.mu1);
    b2_ = make_block(1.0 / (n * p), lv.mu2);
    b3_ = make_block(1.0 / p, lv.mu3_scaled);
    c1_ = Matrix::Identity(A.cols(), A.cols()) * (b1_.scale * n);
    c2_ = A * (b2_.scale * n);
    c3_ = Matrix::Identity(A.rows(), A.rows()) * (b3_.scale * p);
    cap_ = std::sqrt(n);
  }

  int num_blocks() const { return 4; }
  Matrix initial() const { return A_; }
  Matrix linear_term() const { return Matrix(); }
  Matrix apply(int k, const Matrix& w) const {
    switch (k) {
      case 0: return w;
      case 1: return b1_.scale * (A_.transpose() * w);
      case 2: return b2_.scale * (w * S_);
      default: return b3_.scale * (w * A_.transpose());
    }
  }
  Matrix adjoint(int k, const Matrix& y) const {
    switch (k) {
      case 0: return y;
      case 1: return b1_.scale * (A_ * y);
      case 2: return b2_.scale * (y * S_);
      default: return b3_.scale * (y * A_);
    }
  }
  Matrix quadratic(const Matrix& w) const { return 2.0 * w; }
  Matrix project(int k, const Matrix& v) const {
    switch (k) {
      case 0: return project_columns(v);
      case 1: return clamp(v, c1_, b1_.radius);
      case 2: return clamp(v, c2_, b2_.radius);
      default: return clamp(v, c3_, b3_.radius);
    }
  }
  double support(int k, const Matrix& dy) const {
    switch (k) {
      case 0: return cap_ * dy.colwise().norm().sum();
      case 1: return box_support(c1_, b1_.radius, dy);
      case 2: return box_support(c2_, b2_.radius, dy);
      default: return box_support(c3_, b3_.radius, dy);
    }
  }
  Matrix solve(const Matrix& rhs, double rho, double sigma) const {
    const double s1 = b1_.scale * b1_.scale, s2 = b2_.scale * b2_.scale,
                 s3 = b3_.scale * b3_.scale;
    Matrix t = U_.transpose() * rhs * V_;
    const double base = 2.0 + sigma + rho;
    for (Index j = 0; j < t.cols(); ++j) {
      const double col = rho * (s2 * e_(j) * e_(j) + s3 * e_(j));
      for (Index i = 0; i < t.rows(); ++i) t(i, j) /= base + rho * s1 * g_(i) + col;
    }
    return U_ * t * V_.transpose();
  }

  Matrix project_columns(const Matrix& v) const {
    Matrix out = v;
    for (Index j = 0; j < v.cols(); ++j) {
      const double nrm = v.col(j).norm();
      if (nrm > cap_) out.col(j) *= cap_ / nrm;
    }
    return out;
  }

 private:
  static Matrix clamp(const Matrix& v, const Matrix& c, double r) {
    return v.array().max(c.array() - r).min(c.array() + r).matrix();
  }

  const Matrix& A_;
  const Matrix& S_;
  const Matrix& U_;
  const Vector& g_;
  const Matrix& V_;
  const Vector& e_;
  Block b1_, b2_, b3_;
  Matrix c1_, c2_, c3_;
  double cap_ = 1.0;
};

static_assert(BoxQpProblem<DesignProblem>);

struct Levels3 {
  double l1, l2, l3;
};

Levels3 raw_levels(const Matrix& W, const Matrix& A) {
  const double n = static_cast<double>(A.rows());
  const double p = static_cast<double>(A.cols());
  const Matrix WtA = W.transpose() * A / n;
  const Matrix WAt = W * A.transpose();
  const double l1 = kernels::box_violation_diag(WtA, 1.0, 0.0);
  const Matrix c2 = (A - WAt * A / n) / p;
  const double l2 = c2.cwiseAbs().maxCoeff();
  const double l3 = kernels::box_violation_diag(WAt / p, 1.0, 0.0);
  return {l1, l2, l3};
}

}  // namespace

ApproxInverse build_M(const Matrix& A, double mu, const ApproxInverseSettings& s, Index rows) {
  const Index d = A.cols();
  require_dims(A.rows() >= 1 && d >= 1, "build_M: empty design");
  if (!(mu >= 0.0)) throw DomainError("build_M: mu must be non-negative");
  if (rows < 0 || rows > d) rows = d;
  const double n = static_cast<double>(A.rows());
  const Matrix S = A.transpose() * A / n;

  ApproxInverse out;
  out.mu = mu;
  out.M = Matrix::Identity(d, d);
  if (mu >= 1.0) {
    out.M.topRows(rows).setZero();
    out.feasible = true;
    out.status = "trivial";
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  Vector lam = eig.eigenvalues().cwiseMax(0.0);
  const double tiny = 1e-12 * std::max(1.0, lam.maxCoeff());
  for (Index j = 0; j < lam.size(); ++j)
    if (lam(j) < tiny) lam(j) = 0.0;
  ApproxInverseProblem pr(lam, eig.eigenvectors(), rows, mu);
  const AdmmResult r = admm_solve(pr, s.admm);
  out.iterations = r.iterations;
  out.status = to_string(r.status);

  Matrix Mrows = r.x * eig.eigenvectors().transpose();
  Matrix MS = Mrows * S;
  const Matrix Srows = S.topRows(rows);
  double identity_slack = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < rows; ++i) identity_slack = std::min(identity_slack, mu - row_violation(Srows, i, 0.0));

  double worst = 0.0;
  for (Index i = 0; i < rows; ++i) {
    double v = row_violation(MS, i, mu);
    if (v > 0.0 && identity_slack > 0.0) {
      const double t = v / (v + identity_slack);
      Mrows.row(i) = (1.0 - t) * Mrows.row(i);
      Mrows(i, i) += t;
      MS.row(i) = Mrows.row(i) * S;
      v = row_violation(MS, i, mu);
    }
    worst = std::max(worst, v);
  }
  out.max_violation = worst;
  if (r.status == QpStatus::primal_infeasible || worst > 10.0 * s.feas_tol) {
    out.feasible = false;
    return out;
  }
  out.feasible = true;
  out.M.topRows(rows) = Mrows;
  return out;
}

Mus default_mus(Index n, Index p) {
  if (n < 2 || p < 2) throw DomainError("default_mus: need n, p >= 2");
  if (n >= p) throw DomainError("default_mus: requires n < p");
  const double nd = static_cast<double>(n), pd = static_cast<double>(p);
  Mus m;
  m.mu1 = 2.0 * std::sqrt(2.0 * std::log(pd) / nd);
  m.mu2 = 2.0 * std::sqrt(std::log(2.0 * nd * pd) / (nd * pd)) + 1.0 / nd;
  m.mu3 = 2.0 / std::sqrt(1.0 - nd / pd) * std::sqrt(2.0 * std::log(nd) / pd);
  return m;
}

DesignLevels design_levels(const Mus& mus, Index n, Index p) {
  if (n >= p) throw DomainError("design_levels: mu3 is only defined for n < p");
  return {mus.mu1, mus.mu2, mus.mu3 * std::sqrt(1.0 - static_cast<double>(n) / static_cast<double>(p))};
}

DesignLevels default_design_levels(Index n, Index p) {
  if (n < 2 || p < 2) throw DomainError("default_design_levels: need n, p >= 2");
  if (n > p) throw DomainError("default_design_levels: requires n <= p");
  const double nd = static_cast<double>(n), pd = static_cast<double>(p);
  DesignLevels lv;
  lv.mu1 = 2.0 * std::sqrt(2.0 * std::log(pd) / nd);
  lv.mu2 = 2.0 * std::sqrt(std::log(2.0 * nd * pd) / (nd * pd)) + 1.0 / nd;
  lv.mu3_scaled = 2.0 * std::sqrt(2.0 * std::log(nd) / pd);
  return lv;
}

const char* to_string(WeightSource s) {
  switch (s) {
    case WeightSource::identity_of_A: return "identity_of_A";
    case WeightSource::designed: return "designed";
    case WeightSource::fallback: return "fallback";
  }
  return "unknown";
}

double ConstraintResiduals::max() const { return std::max({c0, c1, c2, c3}); }

ConstraintResiduals design_residuals(const Matrix& W, const Matrix& A, const DesignLevels& lv) {
  require_dims(W.rows() == A.rows() && W.cols() == A.cols(), "design_residuals: W and A differ in shape");
  const double n = static_cast<double>(A.rows());
  const auto l = raw_levels(W, A);
  ConstraintResiduals r;
  r.c0 = std::max(kernels::col_sq_norms(W).maxCoeff() / n - 1.0, 0.0);
  r.c1 = std::max(l.l1 - lv.mu1, 0.0);
  r.c2 = std::max(l.l2 - lv.mu2, 0.0);
  r.c3 = std::max(l.l3 - lv.mu3_scaled, 0.0);
  return r;
}

DebiasWeights identity_weights(const Matrix& A) {
  DebiasWeights w;
  w.W = A;
  w.source = WeightSource::identity_of_A;
  w.objective = A.squaredNorm();
  w.solver_status = "none";
  return w;
}

DebiasWeights design_W(const Matrix& A, const DesignLevels& lv, const DesignSettings& s) {
  const Index n = A.rows(), p = A.cols();
  require_dims(n >= 1 && p >= 1, "design_W: empty design");
  if (n > p) throw DomainError("design_W: requires n <= p");
  for (double m : {lv.mu1, lv.mu2, lv.mu3_scaled})
    if (!(m >= 0.0)) throw DomainError("design_W: constraint levels must be non-negative");

  DebiasWeights out;
  out.levels = lv;
  const double nd = static_cast<double>(n), pd = static_cast<double>(p);
  if (n < p) {
    out.mus.mu1 = lv.mu1;
    out.mus.mu2 = lv.mu2;
    out.mus.mu3 = lv.mu3_scaled / std::sqrt(1.0 - nd / pd);
  } else {
    out.mus = {lv.mu1, lv.mu2, std::numeric_limits<double>::infinity()};
  }

  const Matrix S = A.transpose() * A;
  const Matrix G = A * A.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eg(G), es(S);
  const Vector g = eg.eigenvalues().cwiseMax(0.0);
  const Vector e = es.eigenvalues().cwiseMax(0.0);
  DesignProblem pr(A, S, eg.eigenvectors(), g, es.eigenvectors(), e, lv);
  const AdmmResult r = admm_solve(pr, s.admm);
  out.iterations = r.iterations;
  out.solver_status = to_string(r.status);

  auto fallback = [&]() {
    out.W = A;
    out.source = WeightSource::fallback;
    out.constraint_residuals = design_residuals(A, A, lv);
    out.objective = A.squaredNorm();
    out.blend = 1.0;
    return out;
  };
  if (r.status == QpStatus::primal_infeasible) return fallback();

  Matrix W = pr.project_columns(r.x);
  ConstraintResiduals v = design_residuals(W, A, lv);
  const ConstraintResiduals va = design_residuals(A, A, lv);
  const bool a_feasible = va.max() <= 0.0;
  double t = 0.0;
  if (a_feasible && v.max() > 0.0) {
    const auto lw = raw_levels(W, A);
    const auto la = raw_levels(A, A);
    const double slack[3] = {lv.mu1 - la.l1, lv.mu2 - la.l2, lv.mu3_scaled - la.l3};
    const double viol[3] = {lw.l1 - lv.mu1, lw.l2 - lv.mu2, lw.l3 - lv.mu3_scaled};
    for (int k = 0; k < 3; ++k)
      if (viol[k] > 0.0) t = std::max(t, slack[k] > 0.0 ? viol[k] / (viol[k] + slack[k]) : 1.0);
    if (t > 0.0) {
      t = std::min(1.0, t * (1.0 + 1e-9));
      W = (1.0 - t) * W + t * A;
      v = design_residuals(W, A, lv);
    }
  }
  out.blend = t;
  if (v.max() > 10.0 * s.feas_tol) return fallback();
  if (a_feasible && W.squaredNorm() > A.squaredNorm()) {
    W = A;
    v = va;
    out.blend = 1.0;
  }
  out.W = std::move(W);
  out.source = WeightSource::designed;
  out.constraint_residuals = v;
  out.objective = out.W.squaredNorm();
  return out;
}

DebiasWeights design_W(const Matrix& A, double mu1, double mu2, double mu3, const DesignSettings& s) {
  const Index n = A.rows(), p = A.cols();
  if (n >= p) throw DomainError("design_W: requires n < p");
  auto out = design_W(A, design_levels({mu1, mu2, mu3}, n, p), s);
  out.mus = {mu1, mu2, mu3};
  return out;
}

namespace {
void check_debias_shapes(const Vector& b, const Vector& d, const Matrix& W, const Vector& y,
                         const Matrix& A) {
  require_dims(y.size() == A.rows() && d.size() == A.rows(), "debias: y/delta length must equal n");
  require_dims(b.size() == A.cols(), "debias: beta length must equal p");
  require_dims(W.rows() == A.rows() && W.cols() == A.cols(), "debias: W must have the shape of A");
}
}  // namespace

Vector debias_beta(const Vector& beta_hat, const Vector& delta_hat, const Matrix& W,
                   const Vector& y, const Matrix& A) {
  check_debias_shapes(beta_hat, delta_hat, W, y, A);
  const Vector r = y - A * beta_hat - delta_hat;
  return beta_hat + W.transpose() * r / static_cast<double>(A.rows());
}

Vector debias_beta(const RobustLassoFit& fit, const Matrix& W, const Vector& y, const Matrix& A) {
  return debias_beta(fit.beta_hat, fit.delta_hat, W, y, A);
}

Vector debias_delta(const Vector& beta_hat, const Vector& delta_hat, const Matrix& W,
                    const Vector& y, const Matrix& A) {
  check_debias_shapes(beta_hat, delta_hat, W, y, A);
  const Vector r = y - A * beta_hat - delta_hat;
  return delta_hat + r - W * (A.transpose() * r) / static_cast<double>(A.rows());
}

Vector debias_delta(const RobustLassoFit& fit, const Matrix& W, const Vector& y, const Matrix& A) {
  return debias_delta(fit.beta_hat, fit.delta_hat, W, y, A);
}

Vector debias_delta_direct(const RobustLassoFit& fit, const Matrix& W, const Vector& y,
                           const Matrix& A) {
  return y - A * debias_beta(fit, W, y, A);
}

Vector sigma_A_diag(const Matrix& A) {
  const double n = static_cast<double>(A.rows());
  Matrix T = -(A * A.transpose()) / n;
  T.diagonal().array() += 1.0;
  return kernels::row_sq_norms(T);
}

Vector sigma_beta_diag(const Matrix& W, double sigma) {
  return sigma * sigma * (kernels::col_sq_norms(W) / static_cast<double>(W.rows()));
}

Vector sigma_delta_diag(const Matrix& W, const Matrix& A, double sigma) {
  require_dims(W.rows() == A.rows() && W.cols() == A.cols(), "sigma_delta_diag: W must have the shape of A");
  const double n = static_cast<double>(A.rows());
  Matrix T = -(W * A.transpose()) / n;
  T.diagonal().array() += 1.0;
  return sigma * sigma * kernels::row_sq_norms(T);
}

CovarianceDiagonals covariance_diagonals(const Matrix& W, const Matrix& A, double sigma) {
  return {sigma_A_diag(A), sigma_beta_diag(W, sigma), sigma_delta_diag(W, A, sigma)};
}

DebiasDecomposition decompose_debias_error(const ProblemInstance& inst, const RobustLassoFit& fit,
                                           const Matrix& W) {
  const Matrix& A = inst.A.entries();
  const double n = static_cast<double>(A.rows());
  const Vector eta = inst.y.values - inst.A_hat.entries() * inst.beta_star.values();
  const Vector db = inst.beta_star.values() - fit.beta_hat;
  const Vector dd = inst.delta_star.values() - fit.delta_hat;

  DebiasDecomposition out;
  out.beta.noise = W.transpose() * eta / n;
  out.beta.bias_beta = W.transpose() * (A * db) / n - db;
  out.beta.bias_delta = W.transpose() * dd / n;

  auto apply_IminusWAt = [&](const Vector& v) -> Vector { return v - W * (A.transpose() * v) / n; };
  out.delta.noise = apply_IminusWAt(eta);
  out.delta.bias_beta = apply_IminusWAt(A * db);
  out.delta.bias_delta = -W * (A.transpose() * dd) / n;
  return out;
}

}  // namespace drlt
