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

// Reproducible random streams.
//
// Every stream is a std::mt19937_64 whose seed is derived from a 64-bit root
// seed and a list of stream coordinates (e.g. sweep index, run index) by
// repeated SplitMix64 mixing. Two streams with different coordinates are
// statistically independent for all practical purposes, and a stream can be
// recreated from its coordinates alone, which keeps parallel Monte Carlo runs
// replayable regardless of scheduling order.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace drlt {

inline constexpr std::string_view kRngName = "mt19937_64/splitmix64-derived-streams";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> coords) {
  std::uint64_t s = splitmix64(root);
  for (auto c : coords) s = splitmix64(s ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
  return s;
}

class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  Rng(std::uint64_t root, std::initializer_list<std::uint64_t> coords)
      : engine_(derive_seed(root, coords)) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
};

}  // namespace drlt
