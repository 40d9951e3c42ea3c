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

#include "drlt/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

namespace drlt {
namespace {

double subgradient_gap(double value, double grad, double lambda) {
  if (value > 0.0) return std::abs(grad - lambda);
  if (value < 0.0) return std::abs(grad + lambda);
  return std::max(std::abs(grad) - lambda, 0.0);
}

double kkt_scale(const Vector& y, const Matrix& A) {
  const double n = static_cast<double>(A.rows());
  double s = 1.0;
  if (A.cols() > 0) s = std::max(s, (A.transpose() * y).cwiseAbs().maxCoeff() / n);
  if (y.size() > 0) s = std::max(s, y.cwiseAbs().maxCoeff() / n);
  return s;
}

// Absolute KKT violation. `delta` may be null (plain Lasso).
double kkt_abs(const Vector& y, const Matrix& A, const Vector& beta, const Vector* delta,
               double lambda1, double lambda2, Vector* resid_out = nullptr) {
  const double n = static_cast<double>(A.rows());
  Vector r = y - A * beta;
  if (delta) r -= *delta;
  const Vector g = A.transpose() * r / n;
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) worst = std::max(worst, subgradient_gap(beta(j), g(j), lambda1));
  if (delta) {
    for (Index i = 0; i < r.size(); ++i)
      worst = std::max(worst, subgradient_gap((*delta)(i), r(i) / n, lambda2));
  }
  if (resid_out) *resid_out = std::move(r);
  return worst;
}

double penalised_objective(const Vector& r, const Vector& beta, const Vector* delta, double lambda1,
                           double lambda2) {
  double f = r.squaredNorm() / (2.0 * static_cast<double>(r.size())) + lambda1 * beta.lpNorm<1>();
  if (delta) f += lambda2 * delta->lpNorm<1>();
  return f;
}

// Solves the stationarity equations with the current supports and signs held
// fixed; the candidate replaces (beta, delta) only if it lowers the objective.
void polish_support(const Vector& y, const Matrix& A, double lambda1, double lambda2,
                    Vector& beta, Vector* delta, Vector& r) {
  const Index n = A.rows();
  const double nd = static_cast<double>(n);
  std::vector<Index> S, R, F;
  for (Index j = 0; j < A.cols(); ++j)
    if (beta(j) != 0.0) S.push_back(j);
  for (Index i = 0; i < n; ++i) (delta && (*delta)(i) != 0.0 ? R : F).push_back(i);
  const Index s = static_cast<Index>(S.size());
  if (s == 0 || s >= static_cast<Index>(F.size())) return;

  Matrix AF(static_cast<Index>(F.size()), s);
  for (Index k = 0; k < s; ++k)
    for (std::size_t i = 0; i < F.size(); ++i) AF(static_cast<Index>(i), k) = A(F[i], S[std::size_t(k)]);
  Vector rhs(s);
  for (Index k = 0; k < s; ++k) {
    const Index j = S[std::size_t(k)];
    double v = -nd * lambda1 * (beta(j) > 0.0 ? 1.0 : -1.0);
    for (std::size_t i = 0; i < F.size(); ++i) v += AF(static_cast<Index>(i), k) * y(F[i]);
    for (Index i : R) v += nd * lambda2 * ((*delta)(i) > 0.0 ? 1.0 : -1.0) * A(i, j);
    rhs(k) = v;
  }
  const Eigen::LLT<Matrix> llt(AF.transpose() * AF);
  if (llt.info() != Eigen::Success) return;
  const Vector bS = llt.solve(rhs);
  if (!bS.allFinite()) return;

  Vector b = Vector::Zero(A.cols());
  for (Index k = 0; k < s; ++k) b(S[std::size_t(k)]) = bS(k);
  Vector rr = y;
  for (Index k = 0; k < s; ++k) rr.noalias() -= bS(k) * A.col(S[std::size_t(k)]);
  Vector d;
  if (delta) {
    d = Vector::Zero(n);
    for (Index i : R) {
      d(i) = rr(i) - nd * lambda2 * ((*delta)(i) > 0.0 ? 1.0 : -1.0);
      rr(i) -= d(i);
    }
  }
  const double f_new = penalised_objective(rr, b, delta ? &d : nullptr, lambda1, lambda2);
  const double f_old = penalised_objective(r, beta, delta, lambda1, lambda2);
  if (!(f_new < f_old)) return;
  beta = std::move(b);
  if (delta) *delta = std::move(d);
  r = std::move(rr);
}

struct CdOutcome {
  int sweeps = 0;
  double kkt = 0.0;
  bool converged = false;
};

CdOutcome coordinate_descent(const Vector& y, const Matrix& A, double lambda1, double lambda2,
                             Vector& beta, Vector* delta, const CdSettings& s) {
  const Index n = A.rows();
  const Index p = A.cols();
  const double nd = static_cast<double>(n);
  const Vector colsq = A.colwise().squaredNorm().transpose() / nd;
  const double scale = kkt_scale(y, A);
  const double thr2 = nd * lambda2;

  Vector r;
  CdOutcome out;
  out.kkt = kkt_abs(y, A, beta, delta, lambda1, lambda2, &r) / scale;
  if (!delta && out.kkt <= s.kkt_tol) {
    out.converged = true;
    return out;
  }

  auto beta_step = [&](Index j) -> double {
    const double c = colsq(j);
    if (c <= 0.0) {
      const double d = beta(j);
      beta(j) = 0.0;
      return std::abs(d);
    }
    const double g = A.col(j).dot(r) / nd;
    const double b = soft_threshold(c * beta(j) + g, lambda1) / c;
    const double d = b - beta(j);
    if (d != 0.0) {
      r.noalias() -= d * A.col(j);
      beta(j) = b;
    }
    return std::abs(d) * std::sqrt(c);
  };
  auto delta_pass = [&]() -> double {
    if (!delta) return 0.0;
    double m = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double z = r(i) + (*delta)(i);
      const double d = soft_threshold(z, thr2);
      m = std::max(m, std::abs(d - (*delta)(i)));
      r(i) = z - d;
      (*delta)(i) = d;
    }
    return m;
  };

  std::vector<Index> active;
  active.reserve(static_cast<std::size_t>(p));
  while (out.sweeps < s.max_sweeps) {
    double change = 0.0;
    for (Index j = 0; j < p; ++j) change = std::max(change, beta_step(j));
    change = std::max(change, delta_pass());
    ++out.sweeps;

    out.kkt = kkt_abs(y, A, beta, delta, lambda1, lambda2, &r) / scale;
    if (out.kkt <= s.kkt_tol) {
      out.converged = true;
      break;
    }
    if (change == 0.0) break;

    active.clear();
    for (Index j = 0; j < p; ++j)
      if (beta(j) != 0.0) active.push_back(j);
    const double inner_tol = 0.1 * s.kkt_tol * scale;
    for (int k = 0; k < 1000 && out.sweeps < s.max_sweeps; ++k) {
      double c = 0.0;
      for (Index j : active) c = std::max(c, beta_step(j));
      c = std::max(c, delta_pass());
      ++out.sweeps;
      if (c <= inner_tol) break;
      if (k == 20 || k == 200) polish_support(y, A, lambda1, lambda2, beta, delta, r);
    }
    polish_support(y, A, lambda1, lambda2, beta, delta, r);
  }
  return out;
}

// Runs coordinate descent along (lambda1, lambda2) * t for t decreasing
// geometrically from the point where beta = 0 is optimal down to 1.
CdOutcome continuation(const Vector& y, const Matrix& A, double lambda1, double lambda2,
                       Vector& beta, Vector* delta, const CdSettings& s, bool warm) {
  const double nd = static_cast<double>(A.rows());
  double t0 = 1.0;
  if (!warm && lambda1 > 0.0 && A.cols() > 0)
    t0 = (A.transpose() * y).cwiseAbs().maxCoeff() / nd / lambda1;
  int used = 0;
  for (double t = t0 / 2.0; t > 1.5; t /= 2.0) {
    CdSettings stage = s;
    stage.kkt_tol = 1e3 * s.kkt_tol;
    stage.max_sweeps = std::max(1, (s.max_sweeps - used) / 4);
    used += coordinate_descent(y, A, lambda1 * t, lambda2 * t, beta, delta, stage).sweeps;
  }
  CdSettings last = s;
  last.max_sweeps = std::max(1, s.max_sweeps - used);
  CdOutcome out = coordinate_descent(y, A, lambda1, lambda2, beta, delta, last);
  out.sweeps += used;
  return out;
}

}  // namespace

double lasso_l2_objective(const Vector& y, const Matrix& A, const Vector& beta, double lambda) {
  const double n = static_cast<double>(A.rows());
  return (y - A * beta).squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
}

double robust_lasso_objective(const Vector& y, const Matrix& A, const Vector& beta,
                              const Vector& delta, double lambda1, double lambda2) {
  const double n = static_cast<double>(A.rows());
  return (y - A * beta - delta).squaredNorm() / (2.0 * n) + lambda1 * beta.lpNorm<1>() +
         lambda2 * delta.lpNorm<1>();
}

double robust_lasso_kkt(const Vector& y, const Matrix& A, const Vector& beta, const Vector& delta,
                        double lambda1, double lambda2) {
  return kkt_abs(y, A, beta, &delta, lambda1, lambda2) / kkt_scale(y, A);
}

LassoFit lasso_l2(const Vector& y, const Matrix& A, double lambda, const CdSettings& s,
                  const Vector* warm_beta) {
  require_dims(y.size() == A.rows(), "lasso_l2: y length must equal rows of A");
  if (!(lambda >= 0.0)) throw DomainError("lasso_l2: lambda must be non-negative");
  LassoFit fit;
  fit.lambda = lambda;
  fit.method = "coordinate-descent";
  fit.beta = Vector::Zero(A.cols());
  if (warm_beta) {
    require_dims(warm_beta->size() == A.cols(), "lasso_l2: warm start has wrong length");
    fit.beta = *warm_beta;
  }
  const CdOutcome o = continuation(y, A, lambda, 0.0, fit.beta, nullptr, s, warm_beta != nullptr);
  fit.iterations = o.sweeps;
  fit.kkt_residual = o.kkt;
  fit.converged = o.converged;
  fit.objective = lasso_l2_objective(y, A, fit.beta, lambda);
  return fit;
}

RobustLassoFit robust_lasso(const Vector& y, const Matrix& A, double lambda1, double lambda2,
                            const CdSettings& s, const WarmStart* warm) {
  require_dims(y.size() == A.rows(), "robust_lasso: y length must equal rows of A");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
    throw DomainError("robust_lasso: lambdas must be non-negative");
  RobustLassoFit fit;
  fit.lambda1 = lambda1;
  fit.lambda2 = lambda2;
  fit.beta_hat = Vector::Zero(A.cols());
  fit.delta_hat = Vector::Zero(A.rows());
  if (warm) {
    require_dims(warm->beta.size() == A.cols() && warm->delta.size() == A.rows(),
                 "robust_lasso: warm start has wrong shape");
    fit.beta_hat = warm->beta;
    fit.delta_hat = warm->delta;
  }
  const CdOutcome o =
      continuation(y, A, lambda1, lambda2, fit.beta_hat, &fit.delta_hat, s, warm != nullptr);
  fit.iterations = o.sweeps;
  fit.kkt_residual = o.kkt;
  fit.converged = o.converged;
  fit.objective = robust_lasso_objective(y, A, fit.beta_hat, fit.delta_hat, lambda1, lambda2);
  return fit;
}

double lasso_l1_objective(const Vector& y, const Matrix& A, const Vector& beta, double lambda) {
  return (y - A * beta).lpNorm<1>() + lambda * beta.lpNorm<1>();
}

LassoFit lasso_l1(const Vector& y, const Matrix& A, double lambda, const L1Settings& s,
                  const Matrix* gram_rows) {
  require_dims(y.size() == A.rows(), "lasso_l1: y length must equal rows of A");
  if (!(lambda >= 0.0)) throw DomainError("lasso_l1: lambda must be non-negative");
  const Index n = A.rows();
  const Index p = A.cols();
  LassoFit fit;
  fit.lambda = lambda;
  fit.method = "admm";
  fit.beta = Vector::Zero(p);
  if (p == 0 || n == 0) {
    fit.converged = true;
    fit.objective = y.lpNorm<1>();
    return fit;
  }

  const double c2 = std::max(A.squaredNorm() / static_cast<double>(p), 1e-12);
  const double c = std::sqrt(c2);
  Matrix K = gram_rows ? *gram_rows : Matrix(A * A.transpose());
  require_dims(K.rows() == n && K.cols() == n, "lasso_l1: gram_rows must be n x n");
  K.diagonal().array() += c2;
  const Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) throw NumericalError("lasso_l1: factorization failed");

  const double alpha = 1.6;
  const double rho0 = static_cast<double>(n) / std::max(y.lpNorm<1>(), 1e-12);
  double rho = rho0;
  Vector beta = Vector::Zero(p), x = Vector::Zero(p), v2 = Vector::Zero(p);
  Vector u = y, v1 = Vector::Zero(n), Ab = Vector::Zero(n);
  const double ynorm = y.norm();
  const double sq_np = std::sqrt(static_cast<double>(n + p));
  const double sq_p = std::sqrt(static_cast<double>(p));

  int it = 0;
  double rel = std::numeric_limits<double>::infinity();
  bool done = false;
  for (; it < s.max_iter && !done; ++it) {
    const Vector b = A.transpose() * (y - u - v1) + c * (c * x - v2);
    Ab = llt.solve(A * b);
    beta = (b - A.transpose() * Ab) / c2;

    const Vector h1 = alpha * Ab + (1.0 - alpha) * (y - u);
    const Vector h2 = alpha * c * beta + (1.0 - alpha) * c * x;
    const Vector u_old = u, x_old = x;
    u = y - h1 - v1;
    for (Index i = 0; i < n; ++i) u(i) = soft_threshold(u(i), 1.0 / rho);
    x = (h2 + v2) / c;
    for (Index j = 0; j < p; ++j) x(j) = soft_threshold(x(j), lambda / (rho * c2));
    v1 += h1 + u - y;
    v2 += h2 - c * x;

    if ((it + 1) % 10 == 0 || it + 1 == s.max_iter) {
      const double r_prim =
          std::sqrt((Ab + u - y).squaredNorm() + c2 * (beta - x).squaredNorm());
      const double r_dual = rho * (A.transpose() * (u - u_old) - c2 * (x - x_old)).norm();
      const double pri_scale =
          std::max({std::sqrt(Ab.squaredNorm() + c2 * beta.squaredNorm()),
                    std::sqrt(u.squaredNorm() + c2 * x.squaredNorm()), ynorm});
      const double dual_scale = rho * std::max((A.transpose() * v1).norm(), c * v2.norm());
      const double eps_pri = sq_np * s.eps_abs + s.eps_rel * pri_scale;
      const double eps_dual = sq_p * s.eps_abs + s.eps_rel * dual_scale;
      const double rp = r_prim / std::max(pri_scale, 1e-300);
      const double rd = r_dual / std::max(dual_scale, 1e-300);
      rel = std::max(rp, rd);
      if (r_prim <= eps_pri && r_dual <= eps_dual) {
        done = true;
      } else if (rp > 10.0 * rd && rho < 1e6 * rho0) {
        rho *= 2.0;
        v1 /= 2.0;
        v2 /= 2.0;
      } else if (rd > 10.0 * rp && rho > 1e-6 * rho0) {
        rho /= 2.0;
        v1 *= 2.0;
        v2 *= 2.0;
      }
    }
  }
  fit.beta = x;
  fit.iterations = it;
  fit.converged = done;
  fit.kkt_residual = rel;
  fit.objective = lasso_l1_objective(y, A, fit.beta, lambda);
  return fit;
}

LambdaPair default_lambdas(double sigma, Index n, Index p) {
  if (!(sigma >= 0.0)) throw DomainError("default_lambdas: sigma must be non-negative");
  if (n < 1 || p < 1) throw DimensionError("default_lambdas: n and p must be positive");
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  return {4.0 * sigma * std::sqrt(std::log(pd)) / std::sqrt(nd),
          4.0 * sigma * std::sqrt(std::log(nd)) / nd};
}

}  // namespace drlt
