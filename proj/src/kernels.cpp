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

#include "drlt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "drlt/stats.hpp"

namespace drlt::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

inline double row_sq_norm(const Matrix& m, Index i) {
  double s = 0.0;
  for (Index j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
  return s;
}

inline double col_sq_norm(const Matrix& m, Index j) {
  double s = 0.0;
  for (Index i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
  return s;
}

inline double col_box_violation(const Matrix& x, const Matrix& c, double radius, Index j) {
  double worst = 0.0;
  for (Index i = 0; i < x.rows(); ++i)
    worst = std::max(worst, std::abs(x(i, j) - c(i, j)) - radius);
  return worst;
}

inline double col_box_violation_diag(const Matrix& x, double d, double radius, Index j) {
  double worst = 0.0;
  for (Index i = 0; i < x.rows(); ++i)
    worst = std::max(worst, std::abs(x(i, j) - (i == j ? d : 0.0)) - radius);
  return worst;
}

inline Index nearest_for_row(const Matrix& design, const Vector& y, const Matrix& fits,
                             Index l) {
  Index best = 0;
  double best_err = 0.0;
  for (Index k = 0; k < fits.cols(); ++k) {
    double pred = 0.0;
    for (Index j = 0; j < design.cols(); ++j) pred += design(l, j) * fits(j, k);
    const double err = std::abs(y[l] - pred);
    if (k == 0 || err < best_err) {
      best = k;
      best_err = err;
    }
  }
  return best;
}

// Degenerate (constant) columns map to +inf so they always fail a normality
// gate; exceptions must not escape an OpenMP region.
inline double lilliefors_column(const Matrix& samples, Index j) {
  const double* col = samples.col(j).data();
  try {
    return lilliefors_statistic(
        std::span<const double>(col, static_cast<std::size_t>(samples.rows())));
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

namespace serial {

Vector row_sq_norms(const Matrix& m) {
  Vector out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) out[i] = row_sq_norm(m, i);
  return out;
}

Vector col_sq_norms(const Matrix& m) {
  Vector out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) out[j] = col_sq_norm(m, j);
  return out;
}

double box_violation(const Matrix& x, const Matrix& center, double radius) {
  require_dims(x.rows() == center.rows() && x.cols() == center.cols(), "box_violation: shape");
  double worst = 0.0;
  for (Index j = 0; j < x.cols(); ++j) worst = std::max(worst, col_box_violation(x, center, radius, j));
  return worst;
}

double box_violation_diag(const Matrix& x, double diag_center, double radius) {
  double worst = 0.0;
  for (Index j = 0; j < x.cols(); ++j)
    worst = std::max(worst, col_box_violation_diag(x, diag_center, radius, j));
  return worst;
}

std::vector<Index> nearest_model(const Matrix& design, const Vector& y, const Matrix& fits) {
  require_dims(design.cols() == fits.rows() && design.rows() == y.size(), "nearest_model: shape");
  std::vector<Index> votes(static_cast<std::size_t>(design.rows()));
  for (Index l = 0; l < design.rows(); ++l)
    votes[static_cast<std::size_t>(l)] = nearest_for_row(design, y, fits, l);
  return votes;
}

Vector lilliefors_columns(const Matrix& samples) {
  if (samples.rows() < 5) throw DomainError("lilliefors: at least 5 samples required");
  Vector out(samples.cols());
  for (Index j = 0; j < samples.cols(); ++j) out[j] = lilliefors_column(samples, j);
  return out;
}

}  // namespace serial

namespace parallel {

Vector row_sq_norms(const Matrix& m) {
  Vector out(m.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m.rows(); ++i) out[i] = row_sq_norm(m, i);
  return out;
}

Vector col_sq_norms(const Matrix& m) {
  Vector out(m.cols());
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < m.cols(); ++j) out[j] = col_sq_norm(m, j);
  return out;
}

double box_violation(const Matrix& x, const Matrix& center, double radius) {
  require_dims(x.rows() == center.rows() && x.cols() == center.cols(), "box_violation: shape");
  Vector per_col(x.cols());
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < x.cols(); ++j) per_col[j] = col_box_violation(x, center, radius, j);
  return x.cols() > 0 ? std::max(0.0, per_col.maxCoeff()) : 0.0;
}

double box_violation_diag(const Matrix& x, double diag_center, double radius) {
  Vector per_col(x.cols());
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < x.cols(); ++j)
    per_col[j] = col_box_violation_diag(x, diag_center, radius, j);
  return x.cols() > 0 ? std::max(0.0, per_col.maxCoeff()) : 0.0;
}

std::vector<Index> nearest_model(const Matrix& design, const Vector& y, const Matrix& fits) {
  require_dims(design.cols() == fits.rows() && design.rows() == y.size(), "nearest_model: shape");
  std::vector<Index> votes(static_cast<std::size_t>(design.rows()));
#pragma omp parallel for schedule(static)
  for (Index l = 0; l < design.rows(); ++l)
    votes[static_cast<std::size_t>(l)] = nearest_for_row(design, y, fits, l);
  return votes;
}

Vector lilliefors_columns(const Matrix& samples) {
  if (samples.rows() < 5) throw DomainError("lilliefors: at least 5 samples required");
  Vector out(samples.cols());
#pragma omp parallel for schedule(dynamic, 8)
  for (Index j = 0; j < samples.cols(); ++j) out[j] = lilliefors_column(samples, j);
  return out;
}

}  // namespace parallel

}  // namespace drlt::kernels
