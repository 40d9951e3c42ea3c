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

// Scalar statistics: standard normal CDF/quantile and the Lilliefors
// normality test.

#include <span>

#include "drlt/types.hpp"

namespace drlt {

double normal_cdf(double x);

// Inverse standard normal CDF. Acklam's rational approximation followed by one
// Halley correction step against std::erfc; absolute error below 1e-12 on
// (1e-300, 1 - 1e-16).
double normal_quantile(double p);

// Kolmogorov-Smirnov distance between the empirical CDF of the standardised
// sample (sample mean, n-1 standard deviation) and the standard normal CDF.
// Throws DomainError for fewer than 5 samples or zero spread.
double lilliefors_statistic(std::span<const double> samples);

// Critical value of the Lilliefors statistic at level alpha for sample size n.
//
// For alpha <= 0.10 the Dallal-Wilkinson (1986) tail approximation
//   p(D) = exp(-7.01256 D^2 (n + 2.78019) + 2.99587 D sqrt(n + 2.78019)
//              - 0.122119 + 0.974598 / sqrt(n) + 1.67997 / n)
// is inverted for D; for n > 100 the n = 100 value is rescaled by
// (n / 100)^-0.49. For 0.10 < alpha <= 0.15 Stephens' (1974) modified
// statistic D (sqrt(n) - 0.01 + 0.85 / sqrt(n)) with points 0.819 (10%) and
// 0.775 (15%) is interpolated linearly in alpha.
double lilliefors_critical_value(Index n, double alpha);

struct LillieforsResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool normal = true;  // false when the null of normality is rejected
};

LillieforsResult lilliefors_test(std::span<const double> samples, double alpha);

}  // namespace drlt
