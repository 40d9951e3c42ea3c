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

// Synthetic instances: sparse signals, Bernoulli(1/2) pooling designs,
// adversarial (always effective) bit-flips and Gaussian noise.

#include <cstdint>
#include <utility>

#include "drlt/linmodel.hpp"
#include "drlt/rng.hpp"

namespace drlt {

struct GenParams {
  Index p = 500;
  Index n = 400;
  double f_sp = 0.01;
  double f_adv = 0.01;
  double f_sigma = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
  Index sparsity() const;    // s = round(f_sp * p)
  Index mme_count() const;   // r = round(f_adv * n)
};

// Magnitude ranges of the nonzero signal entries.
inline constexpr double kSmallSignalLo = 50.0, kSmallSignalHi = 100.0;
inline constexpr double kLargeSignalLo = 500.0, kLargeSignalHi = 1000.0;
inline constexpr double kSmallSignalFraction = 0.4;

SignalVector gen_signal(Index p, double f_sp, Rng& rng);

std::pair<BinaryPoolingMatrix, RademacherMatrix> gen_pooling(Index n, Index p, Rng& rng);

// Picks r distinct rows; in each, toggles one entry at a column drawn
// uniformly from supp(beta*). Columns are drawn independently per row.
std::pair<RademacherMatrix, MMEVector> inject_adversarial_bitflips(const RademacherMatrix& A,
                                                                   const SignalVector& beta_star,
                                                                   Index r, Rng& rng);

// sigma = f_sigma * mean_i |a_i. beta*|
double noise_sigma(const RademacherMatrix& A, const SignalVector& beta_star, double f_sigma);

Vector gen_noise(Index n, double sigma, Rng& rng);

// Seeds of the four independent generation streams of an instance.
struct InstanceSeeds {
  std::uint64_t signal, pooling, flips, noise;
  static InstanceSeeds from_root(std::uint64_t seed);
};

ProblemInstance assemble_instance(RademacherMatrix A, RademacherMatrix A_hat, SignalVector beta,
                                  double sigma, const Vector& eta);

ProblemInstance gen_instance(const GenParams& params);
ProblemInstance gen_instance(const GenParams& params, const InstanceSeeds& seeds);

}  // namespace drlt
