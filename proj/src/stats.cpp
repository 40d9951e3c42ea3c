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

#include "drlt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace drlt {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step on e = cdf(x) - p.
  const double e = p > 0.5 ? (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2)
                           : 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double lilliefors_statistic(std::span<const double> samples) {
  const auto n = samples.size();
  if (n < 5) throw DomainError("lilliefors: at least 5 samples required");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DomainError("lilliefors: sample has zero variance");

  std::vector<double> z(samples.begin(), samples.end());
  std::sort(z.begin(), z.end());
  double dist = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = normal_cdf((z[i] - mean) / sd);
    dist = std::max({dist, static_cast<double>(i + 1) / nn - f, f - static_cast<double>(i) / nn});
  }
  return dist;
}

namespace {

double dallal_wilkinson_critical(double n, double alpha) {
  const double m = n + 2.78019;
  const double c0 = std::log(alpha) + 0.122119 - 0.974598 / std::sqrt(n) - 1.67997 / n;
  const double qa = 7.01256 * m, qb = -2.99587 * std::sqrt(m);
  const double disc = qb * qb - 4.0 * qa * c0;
  return (-qb + std::sqrt(disc)) / (2.0 * qa);
}

}  // namespace

double lilliefors_critical_value(Index n, double alpha) {
  if (n < 5) throw DomainError("lilliefors: at least 5 samples required");
  if (!(alpha > 0.0 && alpha <= 0.15)) throw DomainError("lilliefors: alpha must lie in (0, 0.15]");
  const double nn = static_cast<double>(n);
  if (alpha <= 0.10) {
    if (n <= 100) return dallal_wilkinson_critical(nn, alpha);
    return dallal_wilkinson_critical(100.0, alpha) * std::pow(nn / 100.0, -0.49);
  }
  const double t = (alpha - 0.10) / 0.05;
  const double modified = 0.819 + t * (0.775 - 0.819);
  return modified / (std::sqrt(nn) - 0.01 + 0.85 / std::sqrt(nn));
}

LillieforsResult lilliefors_test(std::span<const double> samples, double alpha) {
  LillieforsResult r;
  r.statistic = lilliefors_statistic(samples);
  r.critical_value = lilliefors_critical_value(static_cast<Index>(samples.size()), alpha);
  r.normal = r.statistic <= r.critical_value;
  return r;
}

}  // namespace drlt
