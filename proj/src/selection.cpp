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

#include "drlt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

#include "drlt/hypotest.hpp"
#include "drlt/kernels.hpp"
#include "drlt/stats.hpp"

namespace drlt {

LambdaGrid LambdaGrid::range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("LambdaGrid: need step > 0 and hi >= lo");
  LambdaGrid g;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int k = 0; k < count; ++k) g.log_values.push_back(lo + k * step);
  return g;
}

std::vector<double> LambdaGrid::values() const {
  std::vector<double> v;
  for (double l : log_values) v.push_back(std::exp(l));
  return v;
}

void LambdaGrid::validate() const {
  if (log_values.empty()) throw DomainError("LambdaGrid: empty grid");
  for (std::size_t k = 1; k < log_values.size(); ++k)
    if (!(log_values[k] > log_values[k - 1])) throw DomainError("LambdaGrid: grid must be strictly increasing");
  if (!(gate_fraction >= 0.0 && gate_fraction <= 1.0)) throw DomainError("LambdaGrid: gate_fraction outside [0, 1]");
  if (gate_redraws < 5) throw DomainError("LambdaGrid: at least 5 gate redraws required");
  if (gate_max_candidates < 1) throw DomainError("LambdaGrid: gate_max_candidates must be positive");
  if (folds < 2) throw DomainError("LambdaGrid: at least 2 folds required");
  if (!(cv_kkt_tol > 0.0)) throw DomainError("LambdaGrid: cv_kkt_tol must be positive");
}

namespace {

L1Settings harness_l1_settings() {
  L1Settings s;
  s.eps_rel = 1e-4;
  s.eps_abs = 1e-6;
  return s;
}

}  // namespace

RobustLassoFit fit_robust(const Vector& y, const Matrix& A, double lam1, double lam2,
                          const WarmStart* warm, double kkt_tol) {
  CdSettings cs;
  cs.kkt_tol = kkt_tol;
  return robust_lasso(y, A, squared_loss_lambda(lam1, A.rows()), squared_loss_lambda(lam2, A.rows()),
                      cs, warm);
}

LassoFit fit_l2(const Vector& y, const Matrix& A, double lam, const Vector* warm, double kkt_tol) {
  CdSettings cs;
  cs.kkt_tol = kkt_tol;
  return lasso_l2(y, A, squared_loss_lambda(lam, A.rows()), cs, warm);
}

LassoFit fit_l1(const Vector& y, const Matrix& A, double lam) {
  return lasso_l1(y, A, lam, harness_l1_settings());
}

std::vector<int> fold_labels(Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw DomainError("fold_labels: at least 2 folds required");
  if (folds > n) throw DomainError("fold_labels: more folds than rows");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed, {0xF01D});
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<int> label(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < order.size(); ++k)
    label[static_cast<std::size_t>(order[k])] = static_cast<int>(k % static_cast<std::size_t>(folds));
  return label;
}

Matrix rows_of(const Matrix& A, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), A.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = A.row(rows[k]);
  return out;
}

Vector rows_of(const Vector& y, const std::vector<Index>& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) out(static_cast<Index>(k)) = y(rows[k]);
  return out;
}

namespace {

struct Split {
  Matrix A_tr, A_cv;
  Vector y_tr, y_cv;
};

std::vector<Split> make_splits(const Vector& y, const Matrix& A, int folds, std::uint64_t seed) {
  require_dims(y.size() == A.rows(), "cv: y length must equal rows of A");
  const auto label = fold_labels(A.rows(), folds, seed);
  std::vector<Split> out;
  for (int f = 0; f < folds; ++f) {
    std::vector<Index> tr, cv;
    for (Index i = 0; i < A.rows(); ++i) (label[static_cast<std::size_t>(i)] == f ? cv : tr).push_back(i);
    out.push_back({rows_of(A, tr), rows_of(A, cv), rows_of(y, tr), rows_of(y, cv)});
  }
  return out;
}

}  // namespace

double cv_error(const Vector& y, const Matrix& A, double lam1, double lam2, int folds,
                std::uint64_t seed, double kkt_tol) {
  double total = 0.0;
  for (const auto& s : make_splits(y, A, folds, seed)) {
    const auto fit = fit_robust(s.y_tr, s.A_tr, lam1, lam2, nullptr, kkt_tol);
    total += (s.y_cv - s.A_cv * fit.beta_hat).squaredNorm();
  }
  return total / folds;
}

Matrix cv_error_grid(const Vector& y, const Matrix& A, const std::vector<double>& values,
                     int folds, std::uint64_t seed, double kkt_tol) {
  const Index m = static_cast<Index>(values.size());
  Matrix err = Matrix::Zero(m, m);
  for (const auto& s : make_splits(y, A, folds, seed)) {
    WarmStart row_start{Vector::Zero(A.cols()), Vector::Zero(s.y_tr.size())};
    for (Index k = m - 1; k >= 0; --k) {
      WarmStart warm = row_start;
      for (Index i = m - 1; i >= 0; --i) {
        const auto fit = fit_robust(s.y_tr, s.A_tr, values[std::size_t(i)], values[std::size_t(k)], &warm,
                                    kkt_tol);
        err(i, k) += (s.y_cv - s.A_cv * fit.beta_hat).squaredNorm();
        warm = {fit.beta_hat, fit.delta_hat};
        if (i == m - 1) row_start = warm;
      }
    }
  }
  return err / folds;
}

Vector cv_error_single(const Vector& y, const Matrix& A, const std::vector<double>& values,
                       SingleLambdaModel model, int folds, std::uint64_t seed,
                       double kkt_tol) {
  const Index m = static_cast<Index>(values.size());
  Vector err = Vector::Zero(m);
  for (const auto& s : make_splits(y, A, folds, seed)) {
    const Matrix D = model == SingleLambdaModel::l2_augmented ? augmented_design(s.A_tr) : s.A_tr;
    Vector warm = Vector::Zero(D.cols());
    for (Index i = m - 1; i >= 0; --i) {
      const double lam = values[std::size_t(i)];
      Vector beta;
      if (model == SingleLambdaModel::l1) {
        beta = fit_l1(s.y_tr, D, lam).beta;
      } else {
        beta = fit_l2(s.y_tr, D, lam, &warm, kkt_tol).beta;
        warm = beta;
      }
      err(i) += (s.y_cv - s.A_cv * beta.head(A.cols())).squaredNorm();
    }
  }
  return err / folds;
}

GateResult normality_gate(const Matrix& A, double lam1, double lam2, const GateContext& ctx,
                          const LambdaGrid& grid) {
  if (!ctx.W || !ctx.cov || !ctx.redraw) throw DomainError("normality_gate: incomplete context");
  const Index n = A.rows(), p = A.cols();
  const int R = grid.gate_redraws;
  Matrix tb(R, p), td(R, n);
  const Vector sb = ctx.cov->sigma_beta.cwiseSqrt(), sd = ctx.cov->sigma_delta.cwiseSqrt();
  const double rn = std::sqrt(static_cast<double>(n));
  std::optional<WarmStart> warm;
  for (int k = 0; k < R; ++k) {
    const Vector y = ctx.redraw(k);
    const auto fit = fit_robust(y, A, lam1, lam2, warm ? &*warm : nullptr);
    warm = WarmStart{fit.beta_hat, fit.delta_hat};
    tb.row(k) = (rn * debias_beta(fit, *ctx.W, y, A).array() / sb.array()).matrix().transpose();
    td.row(k) = (debias_delta(fit, *ctx.W, y, A).array() / sd.array()).matrix().transpose();
  }
  const double crit = lilliefors_critical_value(R, grid.gate_alpha);
  auto frac = [crit](const Vector& stats) {
    return static_cast<double>((stats.array() <= crit).count()) / static_cast<double>(stats.size());
  };
  GateResult g;
  g.beta_pass = frac(kernels::lilliefors_columns(tb));
  g.delta_pass = frac(kernels::lilliefors_columns(td));
  g.passed = g.beta_pass >= grid.gate_fraction && g.delta_pass >= grid.gate_fraction;
  return g;
}

LambdaSelection select_lambdas(const Vector& y, const Matrix& A, const GateContext& gate,
                               const LambdaGrid& grid, std::uint64_t seed) {
  grid.validate();
  if (A.rows() < grid.folds) throw DomainError("select_lambdas: fewer rows than folds");
  const auto values = grid.values();
  const Index m = static_cast<Index>(values.size());
  const Matrix err = cv_error_grid(y, A, values, grid.folds, seed, grid.cv_kkt_tol);

  std::vector<std::pair<Index, Index>> order;
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < m; ++k) order.emplace_back(i, k);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return err(a.first, a.second) < err(b.first, b.second);
  });

  LambdaSelection sel;
  std::vector<std::optional<GateResult>> gates(order.size());
  std::optional<std::size_t> chosen;
  for (std::size_t c = 0; c < order.size() && sel.gate_evaluations < grid.gate_max_candidates; ++c) {
    const auto [i, k] = order[c];
    gates[c] = normality_gate(A, values[std::size_t(i)], values[std::size_t(k)], gate, grid);
    ++sel.gate_evaluations;
    if (gates[c]->passed) {
      chosen = c;
      break;
    }
  }
  const std::size_t pick = chosen.value_or(0);
  sel.fallback = !chosen;
  const auto [pi, pk] = order[pick];
  sel.lambda1 = values[std::size_t(pi)];
  sel.lambda2 = values[std::size_t(pk)];
  sel.cv_error = err(pi, pk);
  if (gates[pick]) sel.gate = *gates[pick];

  for (std::size_t c = 0; c < order.size(); ++c) {
    const auto [i, k] = order[c];
    SelectionTraceRow row;
    row.log_lambda1 = grid.log_values[std::size_t(i)];
    row.log_lambda2 = grid.log_values[std::size_t(k)];
    row.cv_error = err(i, k);
    row.gate_evaluated = gates[c].has_value();
    if (gates[c]) row.gate = *gates[c];
    sel.trace.push_back(row);
  }
  std::sort(sel.trace.begin(), sel.trace.end(), [](const auto& a, const auto& b) {
    return std::tie(a.log_lambda1, a.log_lambda2) < std::tie(b.log_lambda1, b.log_lambda2);
  });
  return sel;
}

SingleSelection select_single_lambda(const Vector& y, const Matrix& A, const LambdaGrid& grid,
                                     SingleLambdaModel model, std::uint64_t seed) {
  grid.validate();
  const auto values = grid.values();
  SingleSelection s;
  s.errors = cv_error_single(y, A, values, model, grid.folds, seed, grid.cv_kkt_tol);
  Index best = 0;
  for (Index i = 1; i < s.errors.size(); ++i)
    if (s.errors(i) < s.errors(best)) best = i;
  s.lambda = values[std::size_t(best)];
  s.cv_error = s.errors(best);
  return s;
}

void write_selection_trace_csv(std::ostream& os, const LambdaSelection& s) {
  std::ostringstream out;
  out.precision(17);
  out << "log_lambda1,log_lambda2,cv_error,gate_evaluated,beta_pass,delta_pass,gate_passed,selected\n";
  for (const auto& r : s.trace) {
    const bool selected = std::exp(r.log_lambda1) == s.lambda1 && std::exp(r.log_lambda2) == s.lambda2;
    out << r.log_lambda1 << ',' << r.log_lambda2 << ',' << r.cv_error << ',' << int(r.gate_evaluated) << ',';
    if (r.gate_evaluated)
      out << r.gate.beta_pass << ',' << r.gate.delta_pass << ',' << int(r.gate.passed);
    else
      out << ",,";
    out << ',' << int(selected) << '\n';
  }
  os << out.str();
}

double youden_index(const std::vector<double>& scores, const std::vector<bool>& truth, double tau) {
  require_dims(scores.size() == truth.size(), "youden: scores and truth differ in length");
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const bool pos = scores[k] >= tau;
    if (truth[k]) (pos ? tp : fn) += 1;
    else (pos ? fp : tn) += 1;
  }
  return tp / (tp + fn) + tn / (tn + fp) - 1.0;
}

double youden_threshold(const std::vector<double>& scores, const std::vector<bool>& truth) {
  require_dims(scores.size() == truth.size(), "youden: scores and truth differ in length");
  const auto positives = std::count(truth.begin(), truth.end(), true);
  if (positives == 0 || positives == static_cast<long>(truth.size()))
    throw DomainError("youden: truth needs both classes");
  std::vector<double> u = scores;
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  std::vector<double> cand{u.front()};
  for (std::size_t k = 1; k < u.size(); ++k) cand.push_back(0.5 * (u[k - 1] + u[k]));
  double best_tau = cand.front(), best = youden_index(scores, truth, best_tau);
  for (std::size_t k = 1; k < cand.size(); ++k) {
    const double j = youden_index(scores, truth, cand[k]);
    if (j > best) {
      best = j;
      best_tau = cand[k];
    }
  }
  return best_tau;
}

void RansacConfig::validate() const {
  if (subsets < 1) throw DomainError("RansacConfig: subsets must be >= 1");
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0))
    throw DomainError("RansacConfig: subset_fraction must lie in (0, 1]");
}

RansacResult ransac_fit(const Vector& y, const Matrix& A, const RansacConfig& cfg, double lambda,
                        Rng& rng) {
  cfg.validate();
  require_dims(y.size() == A.rows(), "ransac_fit: y length must equal rows of A");
  const Index n = A.rows();
  const Index m = std::max<Index>(1, static_cast<Index>(std::llround(cfg.subset_fraction * double(n))));
  auto base = [&](const Vector& yy, const Matrix& AA) {
    return cfg.base == RansacBase::l1 ? fit_l1(yy, AA, lambda).beta : fit_l2(yy, AA, lambda).beta;
  };

  Matrix fits(A.cols(), cfg.subsets);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (int k = 0; k < cfg.subsets; ++k) {
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    std::vector<Index> sub(idx.begin(), idx.begin() + m);
    std::sort(sub.begin(), sub.end());
    fits.col(k) = base(rows_of(y, sub), rows_of(A, sub));
  }

  RansacResult r;
  const auto votes = kernels::nearest_model(A, y, fits);
  r.votes_per_model.assign(static_cast<std::size_t>(cfg.subsets), 0);
  for (Index v : votes) ++r.votes_per_model[static_cast<std::size_t>(v)];
  r.winner = std::max_element(r.votes_per_model.begin(), r.votes_per_model.end()) - r.votes_per_model.begin();
  for (Index l = 0; l < n; ++l)
    if (votes[static_cast<std::size_t>(l)] == r.winner) r.consensus.push_back(l);
  r.beta = base(rows_of(y, r.consensus), rows_of(A, r.consensus));
  return r;
}

}  // namespace drlt
