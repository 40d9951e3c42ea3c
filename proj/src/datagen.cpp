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

#include "drlt/datagen.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace drlt {

namespace {

Index round_count(double f, Index dim) { return static_cast<Index>(std::lround(f * dim)); }

std::vector<Index> sample_without_replacement(Index universe, Index k, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(universe));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index t = 0; t < k; ++t) {
    const auto pick = static_cast<Index>(rng.index(static_cast<std::size_t>(universe - t))) + t;
    std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

void GenParams::validate() const {
  if (p < 1 || n < 1) throw DomainError("GenParams: n and p must be >= 1");
  for (double f : {f_sp, f_adv, f_sigma})
    if (!(f >= 0.0 && f <= 1.0)) throw DomainError("GenParams: fractions must lie in [0,1]");
}

Index GenParams::sparsity() const { return round_count(f_sp, p); }
Index GenParams::mme_count() const { return round_count(f_adv, n); }

SignalVector gen_signal(Index p, double f_sp, Rng& rng) {
  if (p < 1 || f_sp < 0.0 || f_sp > 1.0) throw DomainError("gen_signal: invalid arguments");
  const Index s = round_count(f_sp, p);
  const auto small = static_cast<Index>(std::floor(kSmallSignalFraction * static_cast<double>(s)));
  Vector beta = Vector::Zero(p);
  const auto positions = sample_without_replacement(p, s, rng);
  for (Index t = 0; t < s; ++t) {
    const double v = t < small ? rng.uniform(kSmallSignalLo, kSmallSignalHi)
                               : rng.uniform(kLargeSignalLo, kLargeSignalHi);
    beta[positions[static_cast<std::size_t>(t)]] = v;
  }
  return SignalVector(std::move(beta));
}

std::pair<BinaryPoolingMatrix, RademacherMatrix> gen_pooling(Index n, Index p, Rng& rng) {
  if (n < 1 || p < 1) throw DomainError("gen_pooling: n and p must be >= 1");
  Matrix b(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) b(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  BinaryPoolingMatrix B(std::move(b));
  auto A = binary_to_rademacher(B);
  return {std::move(B), std::move(A)};
}

std::pair<RademacherMatrix, MMEVector> inject_adversarial_bitflips(const RademacherMatrix& A,
                                                                   const SignalVector& beta_star,
                                                                   Index r, Rng& rng) {
  require_dims(beta_star.size() == A.cols(), "inject_adversarial_bitflips: beta length != p");
  if (r < 0 || r > A.rows()) throw DomainError("inject_adversarial_bitflips: need 0 <= r <= n");
  if (r > 0 && beta_star.sparsity() == 0)
    throw DomainError("inject_adversarial_bitflips: no effective flip possible with empty support");
  Matrix flipped = A.entries();
  const auto rows = sample_without_replacement(A.rows(), r, rng);
  const auto& support = beta_star.support();
  for (auto i : rows) {
    const Index j = support[rng.index(support.size())];
    flipped(i, j) = -flipped(i, j);
  }
  RademacherMatrix A_hat(std::move(flipped));
  auto delta = mme_from_matrices(A, A_hat, beta_star);
  return {std::move(A_hat), std::move(delta)};
}

double noise_sigma(const RademacherMatrix& A, const SignalVector& beta_star, double f_sigma) {
  require_dims(beta_star.size() == A.cols(), "noise_sigma: beta length != p");
  const Vector clean = A.entries() * beta_star.values();
  return f_sigma * clean.cwiseAbs().sum() / static_cast<double>(A.rows());
}

Vector gen_noise(Index n, double sigma, Rng& rng) {
  Vector eta(n);
  for (Index i = 0; i < n; ++i) eta[i] = sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0;
  return eta;
}

InstanceSeeds InstanceSeeds::from_root(std::uint64_t seed) {
  return {derive_seed(seed, {1}), derive_seed(seed, {2}), derive_seed(seed, {3}),
          derive_seed(seed, {4})};
}

ProblemInstance assemble_instance(RademacherMatrix A, RademacherMatrix A_hat, SignalVector beta,
                                  double sigma, const Vector& eta) {
  auto delta = mme_from_matrices(A, A_hat, beta);
  auto y = forward_model(A_hat, beta, Vector::Zero(A.rows()), eta, sigma);
  return ProblemInstance{std::move(A), std::move(A_hat), std::move(beta), std::move(delta),
                         std::move(y), sigma};
}

ProblemInstance gen_instance(const GenParams& params) {
  return gen_instance(params, InstanceSeeds::from_root(params.seed));
}

ProblemInstance gen_instance(const GenParams& params, const InstanceSeeds& seeds) {
  params.validate();
  Rng signal_rng(seeds.signal), pool_rng(seeds.pooling), flip_rng(seeds.flips),
      noise_rng(seeds.noise);
  auto beta = gen_signal(params.p, params.f_sp, signal_rng);
  auto [B, A] = gen_pooling(params.n, params.p, pool_rng);
  auto [A_hat, delta] = inject_adversarial_bitflips(A, beta, params.mme_count(), flip_rng);
  const double sigma = noise_sigma(A, beta, params.f_sigma);
  const Vector eta = gen_noise(params.n, sigma, noise_rng);
  return assemble_instance(std::move(A), std::move(A_hat), std::move(beta), sigma, eta);
}

}  // namespace drlt
