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

#include "drlt/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "drlt/stats.hpp"

namespace drlt::harness {

DetectionRates sensitivity_specificity(const std::vector<bool>& decisions,
                                       const std::vector<bool>& truth) {
  require_dims(decisions.size() == truth.size(), "sensitivity_specificity: length mismatch");
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k]) (decisions[k] ? tp : fn) += 1.0;
    else (decisions[k] ? fp : tn) += 1.0;
  }
  DetectionRates r;
  if (tp + fn > 0.0) r.sensitivity = tp / (tp + fn);
  if (tn + fp > 0.0) r.specificity = tn / (tn + fp);
  return r;
}

double rrmse(const Vector& beta_hat, const Vector& beta_star) {
  require_dims(beta_hat.size() == beta_star.size(), "rrmse: length mismatch");
  const double d = beta_star.norm();
  if (!(d > 0.0)) throw DomainError("rrmse: beta* is zero");
  return (beta_star - beta_hat).norm() / d;
}

std::vector<QQPair> qq_pairs(std::vector<double> samples) {
  if (samples.size() < 2) throw DomainError("qq_pairs: at least 2 samples required");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  std::vector<QQPair> out(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    out[k] = {normal_quantile((static_cast<double>(k) + 0.5) / m), samples[k]};
  return out;
}

Summary summarize(const std::vector<std::optional<double>>& values) {
  Summary s;
  double sum = 0.0;
  for (const auto& v : values)
    if (v) {
      sum += *v;
      ++s.count;
    }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (const auto& v : values)
      if (v) ss += (*v - s.mean) * (*v - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
  }
  return s;
}

}  // namespace drlt::harness
