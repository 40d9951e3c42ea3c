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

// Mismatched linear group-testing model.
//
// A pre-specified binary pooling design B (pools x samples) is mapped to the
// Rademacher design A = 2B - 1. Pools are actually mixed with an unknown
// perturbed design A_hat, so measurements follow
//
//   y = A_hat beta* + eta = A beta* + delta* + eta,   delta* = (A_hat - A) beta*.

#include <vector>

#include "drlt/types.hpp"

namespace drlt {

class BinaryPoolingMatrix {
 public:
  explicit BinaryPoolingMatrix(Matrix entries);
  const Matrix& entries() const { return entries_; }
  Index pools() const { return entries_.rows(); }
  Index samples() const { return entries_.cols(); }

 private:
  Matrix entries_;
};

class RademacherMatrix {
 public:
  explicit RademacherMatrix(Matrix entries);
  const Matrix& entries() const { return entries_; }
  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  bool operator==(const RademacherMatrix& o) const { return entries_ == o.entries_; }

 private:
  Matrix entries_;
};

// A sparse real vector together with the index set of its nonzero entries.
class SparseSupportVector {
 public:
  SparseSupportVector() = default;
  explicit SparseSupportVector(Vector values);
  const Vector& values() const { return values_; }
  const std::vector<Index>& support() const { return support_; }
  Index sparsity() const { return static_cast<Index>(support_.size()); }
  Index size() const { return values_.size(); }
  // Indicator of the support, as used for ground truth in detection metrics.
  std::vector<bool> support_mask() const;

 private:
  Vector values_;
  std::vector<Index> support_;
};

// beta*: per-sample signal (e.g. viral load), support S, sparsity s.
using SignalVector = SparseSupportVector;
// delta*: per-pool model-mismatch error, support R, sparsity r.
using MMEVector = SparseSupportVector;

struct MeasurementVector {
  Vector values;
  double noise_sigma = 0.0;
};

struct ProblemInstance {
  RademacherMatrix A;
  RademacherMatrix A_hat;
  SignalVector beta_star;
  MMEVector delta_star;
  MeasurementVector y;
  double sigma = 0.0;

  Index n() const { return A.rows(); }
  Index p() const { return A.cols(); }
};

RademacherMatrix binary_to_rademacher(const BinaryPoolingMatrix& B);
BinaryPoolingMatrix rademacher_to_binary(const RademacherMatrix& A);

// y = A_hat * beta + delta_extra + eta.
MeasurementVector forward_model(const RademacherMatrix& A_hat, const SignalVector& beta,
                                const Vector& delta_extra, const Vector& eta,
                                double noise_sigma = 0.0);

// delta* = (A_hat - A) beta.
MMEVector mme_from_matrices(const RademacherMatrix& A, const RademacherMatrix& A_hat,
                            const SignalVector& beta);

// Converts pooled binary-design measurements z = B beta + eta~ to the
// equivalent Rademacher-design measurements y = 2z - sum(beta). Only valid
// when the caller knows the total signal mass sum(beta); the returned noise
// level is 2 * sigma_tilde.
MeasurementVector rademacher_measurements(const Vector& z, double total_signal,
                                          double sigma_tilde);

}  // namespace drlt
