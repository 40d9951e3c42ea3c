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

#include "drlt/harness/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <Eigen/Core>

#include "drlt/harness/io.hpp"
#include "drlt/kernels.hpp"
#include "drlt/stats.hpp"

namespace drlt::harness {

using nlohmann::json;

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<bool> nonzero_mask(const Vector& v) {
  std::vector<bool> m(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) m[std::size_t(i)] = v(i) != 0.0;
  return m;
}

bool both_classes(const std::vector<bool>& t) {
  const auto k = std::count(t.begin(), t.end(), true);
  return k > 0 && k < static_cast<long>(t.size());
}

CovarianceDiagonals scaled(const CovarianceDiagonals& unit, double sigma) {
  return {unit.sigma_A, unit.sigma_beta * (sigma * sigma), unit.sigma_delta * (sigma * sigma)};
}

std::string summary_fields(const Summary& s) {
  if (s.count == 0) return ",,0";
  return format_double(s.mean) + "," + format_double(s.se) + "," + std::to_string(s.count);
}

}  // namespace

json RunRecord::to_json() const {
  return {{"suite", suite},
          {"parameter", parameter},
          {"value", value},
          {"run", run},
          {"method", method},
          {"target", target},
          {"sensitivity", optional_json(sensitivity)},
          {"specificity", optional_json(specificity)},
          {"rrmse", optional_json(rrmse)},
          {"kkt", optional_json(kkt)},
          {"converged", converged}};
}

ResultTable ResultTable::aggregate(const std::vector<RunRecord>& records) {
  struct Acc {
    ResultRow row;
    std::vector<std::optional<double>> sens, spec, err;
  };
  std::vector<Acc> acc;
  std::map<std::tuple<std::string, std::uint64_t, std::string, std::string>, std::size_t> index;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.suite, bits(r.value), r.method, r.target);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, acc.size()).first;
      Acc a;
      a.row.suite = r.suite;
      a.row.parameter = r.parameter;
      a.row.value = r.value;
      a.row.method = r.method;
      a.row.target = r.target;
      acc.push_back(std::move(a));
    }
    auto& a = acc[it->second];
    ++a.row.runs;
    a.sens.push_back(r.sensitivity);
    a.spec.push_back(r.specificity);
    a.err.push_back(r.rrmse);
  }
  ResultTable t;
  for (auto& a : acc) {
    a.row.sensitivity = summarize(a.sens);
    a.row.specificity = summarize(a.spec);
    a.row.rrmse = summarize(a.err);
    t.rows.push_back(std::move(a.row));
  }
  return t;
}

std::string ResultTable::csv() const {
  std::string out =
      "suite,parameter,value,method,target,runs,sensitivity_mean,sensitivity_se,sensitivity_n,"
      "specificity_mean,specificity_se,specificity_n,rrmse_mean,rrmse_se,rrmse_n\n";
  for (const auto& r : rows) {
    out += r.suite + "," + r.parameter + "," + format_double(r.value) + "," + r.method + "," +
           r.target + "," + std::to_string(r.runs) + "," + summary_fields(r.sensitivity) + "," +
           summary_fields(r.specificity) + "," + summary_fields(r.rrmse) + "\n";
  }
  return out;
}

const ResultRow* ResultTable::find(const std::string& suite, double value, const std::string& method,
                                   const std::string& target) const {
  for (const auto& r : rows)
    if (r.suite == suite && r.value == value && r.method == method && (target.empty() || r.target == target))
      return &r;
  return nullptr;
}

RobustLassoFit flag_discard_refit(const Vector& y, const Matrix& A, const TestReport& delta_report,
                                  double lambda1, double lambda2) {
  require_dims(static_cast<Index>(delta_report.decisions.size()) == A.rows() && y.size() == A.rows(),
               "flag_discard_refit: report length must equal the number of measurements");
  std::vector<Index> keep;
  for (Index i = 0; i < A.rows(); ++i)
    if (!delta_report.decisions[std::size_t(i)]) keep.push_back(i);
  if (keep.empty()) throw DomainError("flag_discard_refit: every measurement was flagged");
  return fit_robust(rows_of(y, keep), rows_of(A, keep), lambda1, lambda2);
}

double effective_sigma(double sigma, const Vector& y) {
  if (sigma > 0.0) return sigma;
  const double s = y.size() ? 1e-3 * y.cwiseAbs().mean() : 0.0;
  return s > 0.0 ? s : 1e-12;
}

std::string library_version() { return "1.0.0"; }

namespace {

enum class Group { delta, beta, rrmse, table1, qq };

Group group_of(ExperimentId id) {
  switch (id) {
    case ExperimentId::delta_suite: return Group::delta;
    case ExperimentId::beta_suite: return Group::beta;
    case ExperimentId::rrmse_suite: return Group::rrmse;
    default: return Group::table1;
  }
}

struct Design {
  Matrix A;
  DebiasWeights W;
  CovarianceDiagonals unit_A;  // W = A, sigma = 1
  CovarianceDiagonals unit_W;  // designed W, sigma = 1
  std::optional<LassoDebiaser> b1, b2;
};

struct RunFit {
  RobustLassoFit fit;
  double sigma_t = 0.0;
  Vector y;
  DebiasedTests drlt, odrlt;
};

struct Point {
  GenParams g;
  std::uint64_t tag = 0;
  Design* design = nullptr;
  Vector beta_star, delta_star, clean_mean;  // clean_mean = A_hat beta*
  double sigma = 0.0;
  Vector y_sel;
  double sigma_sel = 0.0;
  bool selected = false;
  LambdaSelection sel;
  std::optional<double> lam_l2, lam_l1, lam_clean, lam_aug, rl_tau;
  std::vector<std::optional<RunFit>> runs;
};

json selection_json(const Point& p, Group grp) {
  json j = {{"p", p.g.p},
            {"n", p.g.n},
            {"f_sp", p.g.f_sp},
            {"f_adv", p.g.f_adv},
            {"f_sigma", p.g.f_sigma},
            {"sigma", p.sigma},
            {"weights", to_string(p.design->W.source)},
            {"weights_objective", p.design->W.objective},
            {"log_lambda1", std::log(p.sel.lambda1)},
            {"log_lambda2", std::log(p.sel.lambda2)},
            {"cv_error", p.sel.cv_error},
            {"gate_beta_pass", p.sel.gate.beta_pass},
            {"gate_delta_pass", p.sel.gate.delta_pass},
            {"gate_evaluations", p.sel.gate_evaluations},
            {"fallback", p.sel.fallback}};
  auto put = [&](const char* k, const std::optional<double>& v, bool log) {
    if (v) j[k] = log ? std::log(*v) : *v;
  };
  if (grp == Group::rrmse || grp == Group::table1) put("log_lambda_l2", p.lam_l2, true);
  if (grp == Group::rrmse) put("log_lambda_l1", p.lam_l1, true);
  if (grp == Group::beta) {
    put("log_lambda_clean", p.lam_clean, true);
    put("rl_threshold", p.rl_tau, false);
  }
  if (grp == Group::table1) put("log_lambda_augmented", p.lam_aug, true);
  return j;
}

}  // namespace

struct Engine::Impl {
  Logger log;
  std::map<std::string, std::unique_ptr<Design>> designs;
  std::map<std::string, std::unique_ptr<Point>> points;

  void say(const std::string& s) const {
    if (log) log(s);
  }

  static InstanceSeeds base_seeds(std::uint64_t seed, std::uint64_t noise) {
    return {derive_seed(seed, {1}), derive_seed(seed, {2}), derive_seed(seed, {3}), noise};
  }

  Design& design_for(const ExperimentConfig& cfg, const ProblemInstance& inst) {
    const std::string key = std::to_string(cfg.seed) + "/" + std::to_string(inst.n()) + "x" + std::to_string(inst.p());
    auto& slot = designs[key];
    if (!slot) {
      auto d = std::make_unique<Design>();
      d->A = inst.A.entries();
      say("designing weights for " + std::to_string(inst.n()) + " x " + std::to_string(inst.p()));
      d->W = design_W(d->A, default_design_levels(inst.n(), inst.p()));
      d->unit_A = covariance_diagonals(d->A, d->A, 1.0);
      d->unit_W = covariance_diagonals(d->W.W, d->A, 1.0);
      slot = std::move(d);
    }
    return *slot;
  }

  Point& point_for(const ExperimentConfig& cfg, const GenParams& g) {
    const json key = {{"seed", cfg.seed},   {"p", g.p},         {"n", g.n},
                      {"f_sp", g.f_sp},     {"f_adv", g.f_adv}, {"f_sigma", g.f_sigma},
                      {"alpha", cfg.alpha}, {"grid", cfg.to_json()["selection"]}};
    auto& slot = points[key.dump()];
    if (!slot) {
      auto p = std::make_unique<Point>();
      p->g = g;
      p->tag = derive_seed(cfg.seed, {bits(double(g.p)), bits(double(g.n)), bits(g.f_sp), bits(g.f_adv), bits(g.f_sigma)});
      const auto inst = gen_instance(g, base_seeds(cfg.seed, derive_seed(p->tag, {11})));
      p->design = &design_for(cfg, inst);
      if (p->design->A != inst.A.entries()) throw NumericalError("engine: design cache mismatch");
      p->beta_star = inst.beta_star.values();
      p->delta_star = inst.delta_star.values();
      p->clean_mean = inst.A_hat.entries() * p->beta_star;
      p->sigma = inst.sigma;
      p->y_sel = inst.y.values;
      p->sigma_sel = effective_sigma(p->sigma, p->y_sel);
      slot = std::move(p);
    }
    return *slot;
  }

  Vector noisy(const Point& p, std::uint64_t noise_seed) const {
    Rng rng(noise_seed);
    return p.clean_mean + gen_noise(p.g.n, p.sigma, rng);
  }

  void ensure_selection(const ExperimentConfig& cfg, Point& p) {
    if (p.selected) return;
    const Matrix& A = p.design->A;
    const auto cov = scaled(p.design->unit_W, p.sigma_sel);
    GateContext ctx;
    ctx.W = &p.design->W.W;
    ctx.cov = &cov;
    ctx.redraw = [&](int k) { return noisy(p, derive_seed(p.tag, {12, std::uint64_t(k)})); };
    p.sel = select_lambdas(p.y_sel, A, ctx, cfg.grid, derive_seed(p.tag, {16}));
    p.selected = true;
    std::ostringstream s;
    s << "selected log(lambda1)=" << std::log(p.sel.lambda1) << " log(lambda2)=" << std::log(p.sel.lambda2)
      << (p.sel.fallback ? " (gate fallback)" : "") << " after " << p.sel.gate_evaluations << " gate evaluations";
    say(s.str());
  }

  void ensure_group(const ExperimentConfig& cfg, Point& p, Group grp) {
    const Matrix& A = p.design->A;
    const std::uint64_t fold_seed = derive_seed(p.tag, {16});
    auto single = [&](std::optional<double>& slot, const Vector& y, SingleLambdaModel m) {
      if (!slot) slot = select_single_lambda(y, A, cfg.grid, m, fold_seed).lambda;
    };
    if (grp == Group::beta) {
      single(p.lam_clean, Vector(p.y_sel - p.delta_star), SingleLambdaModel::l2);
      if (!p.design->b1) p.design->b1 = baseline1_debiaser(A);
      if (!p.rl_tau) {
        InstanceSeeds s = base_seeds(cfg.seed, derive_seed(p.tag, {14}));
        s.signal = derive_seed(p.tag, {13});
        const auto train = gen_instance(p.g, s);
        const auto fit = fit_robust(train.y.values, A, p.sel.lambda1, p.sel.lambda2);
        const auto truth = train.beta_star.support_mask();
        std::vector<double> scores(fit.beta_hat.data(), fit.beta_hat.data() + fit.beta_hat.size());
        p.rl_tau = both_classes(truth) ? youden_threshold(scores, truth) : 0.0;
      }
    }
    if (grp == Group::rrmse) {
      single(p.lam_l2, p.y_sel, SingleLambdaModel::l2);
      single(p.lam_l1, p.y_sel, SingleLambdaModel::l1);
    }
    if (grp == Group::table1) {
      single(p.lam_l2, p.y_sel, SingleLambdaModel::l2);
      single(p.lam_aug, p.y_sel, SingleLambdaModel::l2_augmented);
      if (!p.design->b1) p.design->b1 = baseline1_debiaser(A);
      if (!p.design->b2) p.design->b2 = baseline2_debiaser(A);
    }
  }

  const RunFit& run_fit(const ExperimentConfig& cfg, Point& p, int r) {
    auto& slot = p.runs[std::size_t(r)];
    if (!slot) {
      const Matrix& A = p.design->A;
      RunFit f;
      f.y = noisy(p, derive_seed(p.tag, {10, std::uint64_t(r)}));
      f.sigma_t = effective_sigma(p.sigma, f.y);
      f.fit = fit_robust(f.y, A, p.sel.lambda1, p.sel.lambda2);
      f.drlt = run_debiased_tests(f.fit, A, f.y, A, scaled(p.design->unit_A, f.sigma_t), f.sigma_t, cfg.alpha, false);
      f.odrlt = run_debiased_tests(f.fit, p.design->W.W, f.y, A, scaled(p.design->unit_W, f.sigma_t), f.sigma_t,
                                   cfg.alpha, true);
      slot = std::move(f);
    }
    return *slot;
  }

  std::vector<RunRecord> evaluate(const ExperimentConfig& cfg, const Point& p, const RunFit& f, Group grp,
                                  int r, FitCensus& census) const {
    const Matrix& A = p.design->A;
    const Index n = A.rows();
    std::vector<RunRecord> out;
    auto add = [&](const std::string& method, const std::string& target) -> RunRecord& {
      RunRecord rec;
      rec.run = r;
      rec.method = method;
      rec.target = target;
      out.push_back(std::move(rec));
      return out.back();
    };
    auto rates = [](RunRecord& rec, const std::vector<bool>& decisions, const std::vector<bool>& truth) {
      const auto d = sensitivity_specificity(decisions, truth);
      rec.sensitivity = d.sensitivity;
      rec.specificity = d.specificity;
    };
    auto robust = [&](RunRecord& rec, const RobustLassoFit& fit) {
      rec.kkt = fit.kkt_residual;
      rec.converged = fit.converged;
      ++census.fits;
      if (fit.converged) {
        ++census.converged;
        census.max_converged_kkt = std::max(census.max_converged_kkt, fit.kkt_residual);
      }
    };
    auto plain = [&](RunRecord& rec, const LassoFit& fit, bool coordinate_descent) {
      rec.converged = fit.converged;
      if (!coordinate_descent) return;
      rec.kkt = fit.kkt_residual;
      ++census.fits;
      if (fit.converged) {
        ++census.converged;
        census.max_converged_kkt = std::max(census.max_converged_kkt, fit.kkt_residual);
      }
    };

    const auto beta_truth = nonzero_mask(p.beta_star);
    const auto delta_truth = nonzero_mask(p.delta_star);
    switch (grp) {
      case Group::delta: {
        rates(add("DRLT", "delta"), f.drlt.delta.decisions, delta_truth);
        robust(out.back(), f.fit);
        rates(add("ODRLT", "delta"), f.odrlt.delta.decisions, delta_truth);
        robust(out.back(), f.fit);
        auto& rl = add("RL", "delta");
        robust(rl, f.fit);
        if (both_classes(delta_truth)) {
          std::vector<double> scores(static_cast<std::size_t>(n));
          for (Index i = 0; i < n; ++i) scores[std::size_t(i)] = std::abs(f.fit.delta_hat(i));
          const double tau = youden_threshold(scores, delta_truth);
          std::vector<bool> dec(scores.size());
          for (std::size_t i = 0; i < scores.size(); ++i) dec[i] = scores[i] >= tau;
          rates(rl, dec, delta_truth);
        } else {
          std::vector<bool> dec(static_cast<std::size_t>(n));
          for (Index i = 0; i < n; ++i) dec[std::size_t(i)] = f.fit.delta_hat(i) != 0.0;
          rates(rl, dec, delta_truth);
        }
        break;
      }
      case Group::beta: {
        rates(add("DRLT", "beta"), f.drlt.beta.decisions, beta_truth);
        robust(out.back(), f.fit);
        rates(add("ODRLT", "beta"), f.odrlt.beta.decisions, beta_truth);
        robust(out.back(), f.fit);
        std::vector<bool> dec(beta_truth.size());
        for (std::size_t j = 0; j < dec.size(); ++j) dec[j] = f.fit.beta_hat(Index(j)) >= *p.rl_tau;
        rates(add("RL", "beta"), dec, beta_truth);
        robust(out.back(), f.fit);
        const Vector y_clean = f.y - p.delta_star;
        const auto b3 = debiased_lasso_test(*p.design->b1, y_clean, squared_loss_lambda(*p.lam_clean, n),
                                            f.sigma_t, cfg.alpha, TestKind::baseline3);
        rates(add("Baseline-3", "beta"), b3.report.decisions, beta_truth);
        plain(out.back(), b3.fit, true);
        break;
      }
      case Group::rrmse: {
        auto& rl = add("RL", "beta");
        rl.rrmse = rrmse(f.fit.beta_hat, p.beta_star);
        robust(rl, f.fit);
        for (const auto& [name, tests] : {std::pair<const char*, const DebiasedTests*>{"DRL", &f.drlt},
                                          std::pair<const char*, const DebiasedTests*>{"ODRL", &f.odrlt}}) {
          auto& rec = add(name, "beta");
          try {
            const auto refit = flag_discard_refit(f.y, A, tests->delta, p.sel.lambda1, p.sel.lambda2);
            rec.rrmse = rrmse(refit.beta_hat, p.beta_star);
            robust(rec, refit);
          } catch (const DomainError&) {
            rec.converged = false;
          }
        }
        const auto l2 = fit_l2(f.y, A, *p.lam_l2);
        add("L2", "beta").rrmse = rrmse(l2.beta, p.beta_star);
        plain(out.back(), l2, true);
        const auto l1 = fit_l1(f.y, A, *p.lam_l1);
        add("L1", "beta").rrmse = rrmse(l1.beta, p.beta_star);
        plain(out.back(), l1, false);
        for (const auto& [name, base, lam] :
             {std::tuple<const char*, RansacBase, double>{"RL1", RansacBase::l1, *p.lam_l1},
              std::tuple<const char*, RansacBase, double>{"RL2", RansacBase::l2, *p.lam_l2}}) {
          RansacConfig rc = cfg.ransac;
          rc.base = base;
          Rng rng(p.tag, {15, std::uint64_t(r), std::uint64_t(base == RansacBase::l1 ? 1 : 2)});
          const auto res = ransac_fit(f.y, A, rc, lam, rng);
          add(name, "beta").rrmse = rrmse(res.beta, p.beta_star);
        }
        break;
      }
      case Group::table1: {
        rates(add("ODRLT", "beta"), f.odrlt.beta.decisions, beta_truth);
        robust(out.back(), f.fit);
        const auto b1 = debiased_lasso_test(*p.design->b1, f.y, squared_loss_lambda(*p.lam_l2, n), f.sigma_t,
                                            cfg.alpha, TestKind::baseline1);
        rates(add("Baseline-1", "beta"), b1.report.decisions, beta_truth);
        plain(out.back(), b1.fit, true);
        const auto b2 = debiased_lasso_test(*p.design->b2, f.y, squared_loss_lambda(*p.lam_aug, n), f.sigma_t,
                                            cfg.alpha, TestKind::baseline2);
        rates(add("Baseline-2", "beta"), b2.report.decisions, beta_truth);
        plain(out.back(), b2.fit, true);
        break;
      }
    }
    return out;
  }

  ExperimentResult run_sweeps(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.config = cfg;
    const Group grp = group_of(cfg.id);
    json points_meta = json::array();
    for (const auto& sw : cfg.sweeps) {
      for (double v : sw.values) {
        const GenParams g = at_point(cfg.fixed, sw.parameter, v);
        say(std::string(to_string(cfg.id)) + " " + sw.label + " " + to_string(sw.parameter) + "=" + format_double(v));
        Point& p = point_for(cfg, g);
        ensure_selection(cfg, p);
        ensure_group(cfg, p, grp);
        if (p.runs.size() < std::size_t(cfg.runs)) p.runs.resize(std::size_t(cfg.runs));
        for (int r = 0; r < cfg.runs; ++r)
          if (!p.runs[std::size_t(r)]) run_fit(cfg, p, r);

        std::vector<std::vector<RunRecord>> per_run(std::size_t(cfg.runs));
        std::vector<FitCensus> census(std::size_t(cfg.runs));
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < cfg.runs; ++r)
          per_run[std::size_t(r)] = evaluate(cfg, p, *p.runs[std::size_t(r)], grp, r, census[std::size_t(r)]);
        for (int r = 0; r < cfg.runs; ++r) {
          for (auto& rec : per_run[std::size_t(r)]) {
            rec.suite = sw.label;
            rec.parameter = to_string(sw.parameter);
            rec.value = v;
            res.records.push_back(std::move(rec));
          }
          const auto& c = census[std::size_t(r)];
          res.census.fits += c.fits;
          res.census.converged += c.converged;
          res.census.max_converged_kkt = std::max(res.census.max_converged_kkt, c.max_converged_kkt);
        }
        json pm = selection_json(p, grp);
        pm["suite"] = sw.label;
        pm["parameter"] = to_string(sw.parameter);
        pm["value"] = v;
        points_meta.push_back(std::move(pm));
      }
    }
    res.table = ResultTable::aggregate(res.records);
    res.meta = base_meta(cfg);
    res.meta["points"] = points_meta;
    res.meta["fits"] = {{"count", res.census.fits},
                        {"converged", res.census.converged},
                        {"max_converged_kkt", res.census.max_converged_kkt}};
    return res;
  }

  ExperimentResult run_qq(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.config = cfg;
    Point& p = point_for(cfg, cfg.fixed);
    ensure_selection(cfg, p);
    if (p.runs.size() < std::size_t(cfg.runs)) p.runs.resize(std::size_t(cfg.runs));
    const Index n = p.g.n, np = p.g.p;
    QQResult qq;
    qq.t_beta.resize(cfg.runs, np);
    qq.t_delta.resize(cfg.runs, n);
    const double rn = std::sqrt(static_cast<double>(n));
    for (int r = 0; r < cfg.runs; ++r) {
      const auto& f = run_fit(cfg, p, r);
      const auto cov = scaled(p.design->unit_W, f.sigma_t);
      qq.t_beta.row(r) = (rn * (f.odrlt.beta_W - p.beta_star).array() / cov.sigma_beta.array().sqrt()).matrix().transpose();
      qq.t_delta.row(r) = ((f.odrlt.delta_W - p.delta_star).array() / cov.sigma_delta.array().sqrt()).matrix().transpose();
      RunRecord rec;
      rec.suite = "qq";
      rec.parameter = "run";
      rec.value = r;
      rec.run = r;
      rec.method = "ODRLT";
      rec.target = "both";
      rec.kkt = f.fit.kkt_residual;
      rec.converged = f.fit.converged;
      res.records.push_back(rec);
      ++res.census.fits;
      if (f.fit.converged) {
        ++res.census.converged;
        res.census.max_converged_kkt = std::max(res.census.max_converged_kkt, f.fit.kkt_residual);
      }
    }
    qq.lilliefors_beta = kernels::lilliefors_columns(qq.t_beta);
    qq.lilliefors_delta = kernels::lilliefors_columns(qq.t_delta);
    qq.critical_value = lilliefors_critical_value(cfg.runs, cfg.grid.gate_alpha);
    qq.beta_pass = double((qq.lilliefors_beta.array() <= qq.critical_value).count()) / double(np);
    qq.delta_pass = double((qq.lilliefors_delta.array() <= qq.critical_value).count()) / double(n);
    res.meta = base_meta(cfg);
    res.meta["points"] = json::array({selection_json(p, Group::qq)});
    res.meta["qq"] = {{"beta_pass", qq.beta_pass}, {"delta_pass", qq.delta_pass}, {"critical_value", qq.critical_value}};
    res.meta["fits"] = {{"count", res.census.fits},
                        {"converged", res.census.converged},
                        {"max_converged_kkt", res.census.max_converged_kkt}};
    res.qq = std::move(qq);
    return res;
  }

  static json base_meta(const ExperimentConfig& cfg) {
    const CdSettings cd;
    return {{"experiment", to_string(cfg.id)},
            {"config", cfg.to_json()},
            {"library", {{"name", "drlt"},
                         {"version", library_version()},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                       "." + std::to_string(EIGEN_MINOR_VERSION)}}},
            {"rng", std::string(kRngName)},
            {"tolerances", {{"robust_lasso_kkt", cd.kkt_tol},
                            {"cv_kkt", cfg.grid.cv_kkt_tol},
                            {"l1_admm_eps_rel", 1e-4},
                            {"l1_admm_eps_abs", 1e-6},
                            {"weight_design_feasibility", DesignSettings{}.feas_tol}}}};
  }
};

Engine::Engine(Logger log) : impl_(std::make_unique<Impl>()) { impl_->log = std::move(log); }
Engine::~Engine() = default;

ExperimentResult Engine::run(const ExperimentConfig& cfg) {
  cfg.validate();
  return cfg.id == ExperimentId::qq_export ? impl_->run_qq(cfg) : impl_->run_sweeps(cfg);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  Engine e;
  return e.run(cfg);
}

void write_outputs(const ExperimentResult& r, const std::filesystem::path& dir) {
  const std::string stem = to_string(r.config.id);
  std::string jsonl;
  for (const auto& rec : r.records) jsonl += rec.to_json().dump() + "\n";
  write_text_file(dir / (stem + "_runs.jsonl"), jsonl);
  write_text_file(dir / (stem + "_meta.json"), r.meta.dump(2) + "\n");
  if (!r.qq) {
    write_text_file(dir / (stem + ".csv"), r.table.csv());
    return;
  }
  const auto& q = *r.qq;
  std::string summary = "statistic,coordinates,runs,critical_value,pass_fraction\n";
  summary += "T_G," + std::to_string(q.t_beta.cols()) + "," + std::to_string(q.t_beta.rows()) + "," +
             format_double(q.critical_value) + "," + format_double(q.beta_pass) + "\n";
  summary += "T_H," + std::to_string(q.t_delta.cols()) + "," + std::to_string(q.t_delta.rows()) + "," +
             format_double(q.critical_value) + "," + format_double(q.delta_pass) + "\n";
  write_text_file(dir / (stem + ".csv"), summary);
  auto pairs_csv = [](const Matrix& t) {
    std::string out = "coordinate,rank,theoretical,empirical\n";
    for (Index c = 0; c < t.cols(); ++c) {
      std::vector<double> s(static_cast<std::size_t>(t.rows()));
      for (Index k = 0; k < t.rows(); ++k) s[std::size_t(k)] = t(k, c);
      const auto pairs = qq_pairs(std::move(s));
      for (std::size_t k = 0; k < pairs.size(); ++k)
        out += std::to_string(c) + "," + std::to_string(k + 1) + "," + format_double(pairs[k].theoretical) + "," +
               format_double(pairs[k].empirical) + "\n";
    }
    return out;
  };
  write_text_file(dir / "qq_beta.csv", pairs_csv(q.t_beta));
  write_text_file(dir / "qq_delta.csv", pairs_csv(q.t_delta));
}

}  // namespace drlt::harness
