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

#include "drlt/linmodel.hpp"

#include <string>

namespace drlt {

BinaryPoolingMatrix::BinaryPoolingMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_dims(entries_.rows() >= 1 && entries_.cols() >= 1, "pooling matrix must be non-empty");
  for (Index j = 0; j < entries_.cols(); ++j)
    for (Index i = 0; i < entries_.rows(); ++i) {
      const double v = entries_(i, j);
      if (v != 0.0 && v != 1.0) throw DomainError("pooling matrix entries must be 0 or 1");
    }
}

RademacherMatrix::RademacherMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_dims(entries_.rows() >= 1 && entries_.cols() >= 1,
               "Rademacher matrix must be non-empty");
  for (Index j = 0; j < entries_.cols(); ++j)
    for (Index i = 0; i < entries_.rows(); ++i) {
      const double v = entries_(i, j);
      if (v != 1.0 && v != -1.0) throw DomainError("Rademacher entries must be -1 or +1");
    }
}

SparseSupportVector::SparseSupportVector(Vector values) : values_(std::move(values)) {
  for (Index i = 0; i < values_.size(); ++i)
    if (values_[i] != 0.0) support_.push_back(i);
}

std::vector<bool> SparseSupportVector::support_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(values_.size()), false);
  for (auto i : support_) mask[static_cast<std::size_t>(i)] = true;
  return mask;
}

RademacherMatrix binary_to_rademacher(const BinaryPoolingMatrix& B) {
  return RademacherMatrix((2.0 * B.entries().array() - 1.0).matrix());
}

BinaryPoolingMatrix rademacher_to_binary(const RademacherMatrix& A) {
  return BinaryPoolingMatrix(((A.entries().array() + 1.0) / 2.0).matrix());
}

MeasurementVector forward_model(const RademacherMatrix& A_hat, const SignalVector& beta,
                                const Vector& delta_extra, const Vector& eta,
                                double noise_sigma) {
  require_dims(beta.size() == A_hat.cols(), "forward_model: beta length != columns");
  require_dims(delta_extra.size() == A_hat.rows(), "forward_model: delta length != rows");
  require_dims(eta.size() == A_hat.rows(), "forward_model: eta length != rows");
  MeasurementVector y;
  y.values = A_hat.entries() * beta.values() + delta_extra + eta;
  y.noise_sigma = noise_sigma;
  return y;
}

MMEVector mme_from_matrices(const RademacherMatrix& A, const RademacherMatrix& A_hat,
                            const SignalVector& beta) {
  require_dims(A.rows() == A_hat.rows() && A.cols() == A_hat.cols(),
               "mme_from_matrices: A and A_hat differ in shape");
  require_dims(beta.size() == A.cols(), "mme_from_matrices: beta length != columns");
  Vector delta = Vector::Zero(A.rows());
  const Matrix& a = A.entries();
  const Matrix& ah = A_hat.entries();
  for (Index j = 0; j < a.cols(); ++j) {
    const double bj = beta.values()[j];
    if (bj == 0.0) continue;
    for (Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != ah(i, j)) delta[i] += (ah(i, j) - a(i, j)) * bj;
  }
  return MMEVector(std::move(delta));
}

MeasurementVector rademacher_measurements(const Vector& z, double total_signal,
                                          double sigma_tilde) {
  MeasurementVector y;
  y.values = (2.0 * z.array() - total_signal).matrix();
  y.noise_sigma = 2.0 * sigma_tilde;
  return y;
}

}  // namespace drlt
