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

// Data-parallel inner loops.
//
// Each kernel exists twice: a straightforward serial reference in
// kernels::serial and an OpenMP version in kernels::parallel. The parallel
// versions partition work by output element only, so they produce results
// bit-identical to the serial reference (no parallel reductions over floats).
// Tests compare the two; bench/ times them.

#include <cstddef>
#include <vector>

#include "drlt/types.hpp"

namespace drlt::kernels {

namespace serial {

Vector row_sq_norms(const Matrix& m);
Vector col_sq_norms(const Matrix& m);
// max_ij max(|x_ij - c_ij| - radius, 0)
double box_violation(const Matrix& x, const Matrix& center, double radius);
// Same with center = diag(d) (all off-diagonal centers zero).
double box_violation_diag(const Matrix& x, double diag_center, double radius);
// For each row l of `design`, index of the column k of `fits` minimising
// |y_l - design_l . fits_k|; ties go to the lowest k.
std::vector<Index> nearest_model(const Matrix& design, const Vector& y, const Matrix& fits);
// Lilliefors statistic of every column of `samples` (rows are replicates).
Vector lilliefors_columns(const Matrix& samples);

}  // namespace serial

namespace parallel {

Vector row_sq_norms(const Matrix& m);
Vector col_sq_norms(const Matrix& m);
double box_violation(const Matrix& x, const Matrix& center, double radius);
double box_violation_diag(const Matrix& x, double diag_center, double radius);
std::vector<Index> nearest_model(const Matrix& design, const Vector& y, const Matrix& fits);
Vector lilliefors_columns(const Matrix& samples);

}  // namespace parallel

using parallel::box_violation;
using parallel::box_violation_diag;
using parallel::col_sq_norms;
using parallel::lilliefors_columns;
using parallel::nearest_model;
using parallel::row_sq_norms;

int max_threads();

}  // namespace drlt::kernels
