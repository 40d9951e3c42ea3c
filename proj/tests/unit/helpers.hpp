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

#include <cstdint>

#include "drlt/rng.hpp"
#include "drlt/types.hpp"

namespace drlt::testing {

inline Matrix random_sign_matrix(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = rng.bernoulli(0.5) ? 1.0 : -1.0;
  return m;
}

inline Matrix random_normal_matrix(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = rng.normal();
  return m;
}

inline Vector random_normal_vector(Index n, std::uint64_t seed, double sd = 1.0) {
  Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal(0.0, sd);
  return v;
}

inline Vector sparse_vector(Index p, std::initializer_list<std::pair<Index, double>> entries) {
  Vector v = Vector::Zero(p);
  for (auto [j, x] : entries) v(j) = x;
  return v;
}

}  // namespace drlt::testing
