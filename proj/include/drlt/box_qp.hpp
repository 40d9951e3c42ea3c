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

// Operator-splitting solver for convex quadratic programs with box-type
// constraint blocks:
//
//   minimize  f(x) = 1/2 <x, P x> + <q, x>
//   subject to K_k x in C_k,  k = 0..m-1
//
// where each C_k is a closed convex set with a cheap projection (an entrywise
// interval, a set of column-norm caps, ...). The variable is a dense matrix
// so that row-batched problems can share one linear operator; vector
// problems use a single column.
//
// The iteration is the relaxed ADMM used by OSQP: with sigma > 0 the x-step
// solves (P + sigma I + rho sum_k K_k^* K_k) x = rhs, and primal
// infeasibility is detected from the dual increment dy via
// ||sum K_k^* dy_k||_inf <= eps ||dy||_inf and sum_k supp_{C_k}(dy_k) < -eps ||dy||_inf.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <vector>

#include "drlt/types.hpp"

namespace drlt {

template <class P>
concept BoxQpProblem = requires(const P& pr, const Matrix& x, int k, double rho, double sigma) {
  { pr.num_blocks() } -> std::convertible_to<int>;
  { pr.initial() } -> std::convertible_to<Matrix>;
  { pr.linear_term() } -> std::convertible_to<Matrix>;
  { pr.apply(k, x) } -> std::convertible_to<Matrix>;
  { pr.adjoint(k, x) } -> std::convertible_to<Matrix>;
  { pr.quadratic(x) } -> std::convertible_to<Matrix>;
  { pr.project(k, x) } -> std::convertible_to<Matrix>;
  { pr.support(k, x) } -> std::convertible_to<double>;
  { pr.solve(x, rho, sigma) } -> std::convertible_to<Matrix>;
};

enum class QpStatus { solved, max_iterations, primal_infeasible };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::solved: return "solved";
    case QpStatus::max_iterations: return "max_iterations";
    case QpStatus::primal_infeasible: return "primal_infeasible";
  }
  return "unknown";
}

struct AdmmSettings {
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  double eps_infeasible = 1e-6;
  int max_iter = 10000;
  int check_every = 10;
  bool adaptive_rho = true;
};

struct AdmmResult {
  Matrix x;
  QpStatus status = QpStatus::max_iterations;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  double rho = 0.0;
};

namespace detail {
inline double inf_norm(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
}  // namespace detail

template <BoxQpProblem Problem>
AdmmResult admm_solve(const Problem& pr, const AdmmSettings& s) {
  using detail::inf_norm;
  const int m = pr.num_blocks();
  const Matrix q = pr.linear_term();
  AdmmResult res;
  Matrix x = pr.initial();
  const bool has_q = q.size() == x.size();

  std::vector<Matrix> Kx(m), z(m), y(m), y_prev(m);
  for (int k = 0; k < m; ++k) {
    Kx[k] = pr.apply(k, x);
    z[k] = pr.project(k, Kx[k]);
    y[k] = Matrix::Zero(Kx[k].rows(), Kx[k].cols());
  }
  double rho = s.rho;
  const double a = s.alpha;

  for (int it = 0; it < s.max_iter; ++it) {
    Matrix rhs = s.sigma * x;
    if (has_q) rhs -= q;
    for (int k = 0; k < m; ++k) rhs += pr.adjoint(k, rho * z[k] - y[k]);
    const Matrix xt = pr.solve(rhs, rho, s.sigma);

    const bool check = (it + 1) % s.check_every == 0 || it + 1 == s.max_iter;
    for (int k = 0; k < m; ++k) {
      const Matrix zt = pr.apply(k, xt);
      const Matrix zr = a * zt + (1.0 - a) * z[k];
      if (check) y_prev[k] = y[k];
      Matrix znew = pr.project(k, zr + y[k] / rho);
      y[k] += rho * (zr - znew);
      z[k] = std::move(znew);
      Kx[k] = a * zt + (1.0 - a) * Kx[k];
    }
    x = a * xt + (1.0 - a) * x;
    res.iterations = it + 1;
    if (!check) continue;

    double r_prim = 0.0, kx_norm = 0.0, z_norm = 0.0;
    for (int k = 0; k < m; ++k) {
      r_prim = std::max(r_prim, inf_norm(Kx[k] - z[k]));
      kx_norm = std::max(kx_norm, inf_norm(Kx[k]));
      z_norm = std::max(z_norm, inf_norm(z[k]));
    }
    const Matrix Px = pr.quadratic(x);
    Matrix Kty = Matrix::Zero(x.rows(), x.cols());
    for (int k = 0; k < m; ++k) Kty += pr.adjoint(k, y[k]);
    Matrix grad = Px + Kty;
    if (has_q) grad += q;
    const double r_dual = inf_norm(grad);
    const double pri_scale = std::max(kx_norm, z_norm);
    const double dual_scale = std::max({inf_norm(Px), inf_norm(Kty), has_q ? inf_norm(q) : 0.0});
    res.primal_residual = r_prim;
    res.dual_residual = r_dual;
    res.rho = rho;
    if (r_prim <= s.eps_abs + s.eps_rel * pri_scale &&
        r_dual <= s.eps_abs + s.eps_rel * dual_scale) {
      res.status = QpStatus::solved;
      break;
    }

    double dy_norm = 0.0, supp = 0.0;
    Matrix Ktdy = Matrix::Zero(x.rows(), x.cols());
    for (int k = 0; k < m; ++k) {
      const Matrix dy = y[k] - y_prev[k];
      dy_norm = std::max(dy_norm, inf_norm(dy));
      Ktdy += pr.adjoint(k, dy);
      supp += pr.support(k, dy);
    }
    if (dy_norm > 0.0 && inf_norm(Ktdy) <= s.eps_infeasible * dy_norm &&
        supp < -s.eps_infeasible * dy_norm) {
      res.status = QpStatus::primal_infeasible;
      break;
    }

    if (s.adaptive_rho && pri_scale > 0.0 && dual_scale > 0.0 && r_dual > 0.0) {
      const double ratio = std::sqrt((r_prim / pri_scale) / (r_dual / dual_scale));
      const double next = std::clamp(rho * ratio, 1e-8, 1e8);
      if (next > 5.0 * rho || next < rho / 5.0) rho = next;
    }
  }
  res.objective = 0.5 * (x.array() * pr.quadratic(x).array()).sum();
  if (has_q) res.objective += (q.array() * x.array()).sum();
  res.rho = rho;
  res.x = std::move(x);
  return res;
}

// Vector QP with interval-bounded affine blocks l_k <= K_k x <= u_k and an
// optional Euclidean cap ||x||_2 <= c.
struct DenseBoxQp {
  struct Block {
    Matrix K;
    Vector lower;
    Vector upper;
  };
  Matrix P;
  Vector q;
  std::vector<Block> blocks;
  std::optional<double> norm_cap;

  Index dim() const { return P.rows(); }
  void validate() const;
};

struct QpSolution {
  Vector x;
  QpStatus status = QpStatus::max_iterations;
  int iterations = 0;
  double objective = 0.0;
  double max_violation = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

QpSolution solve_box_qp(const DenseBoxQp& qp, double tol = 1e-8, int max_iter = 20000);
QpSolution solve_box_qp(const DenseBoxQp& qp, const AdmmSettings& s);

double box_qp_violation(const DenseBoxQp& qp, const Vector& x);

}  // namespace drlt
