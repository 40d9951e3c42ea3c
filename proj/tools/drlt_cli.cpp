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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "drlt/datagen.hpp"
#include "drlt/debias.hpp"
#include "drlt/harness/config.hpp"
#include "drlt/harness/experiment.hpp"
#include "drlt/harness/io.hpp"
#include "drlt/hypotest.hpp"
#include "drlt/selection.hpp"

namespace {

using namespace drlt;
using namespace drlt::harness;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool full = false;
  bool quiet = false;
};

json load_config(const Options& o) {
  if (o.config.empty()) return json::object();
  if (!fs::exists(o.config)) throw ConfigError("config file not found: " + o.config);
  return parse_json_text(read_text_file(o.config));
}

InstanceConfig instance_config(const Options& o) {
  auto c = instance_config_from_json(load_config(o), o.full);
  if (o.seed) c.params.seed = *o.seed;
  return c;
}

ProblemInstance load_instance(const InstanceConfig& c) {
  if (!c.instance_file) return gen_instance(c.params);
  try {
    return instance_from_json(parse_json_text(read_text_file(*c.instance_file)));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("instance bundle " + *c.instance_file + ": " + e.what());
  }
}

json fit_json(const RobustLassoFit& f) {
  return {{"log_lambda1", std::log(f.lambda1)}, {"log_lambda2", std::log(f.lambda2)},
          {"objective", f.objective},           {"kkt_residual", f.kkt_residual},
          {"iterations", f.iterations},         {"converged", f.converged}};
}

json base_meta(const std::string& command, const InstanceConfig& c) {
  return {{"command", command}, {"config", to_json(c)}, {"library", {{"name", "drlt"}, {"version", library_version()}}},
          {"rng", std::string(kRngName)}};
}

struct Prepared {
  ProblemInstance inst;
  double sigma = 0.0;
  std::optional<DebiasWeights> W;
  RobustLassoFit fit;
  json selection;
};

// Loads or generates the instance, fixes the penalties and fits the robust Lasso.
Prepared prepare(const InstanceConfig& c, bool need_W) {
  Prepared p{load_instance(c), 0.0, std::nullopt, {}, json::object()};
  const Matrix& A = p.inst.A.entries();
  const Vector& y = p.inst.y.values;
  p.sigma = effective_sigma(p.inst.sigma, y);
  double lam1, lam2;
  if (c.lambda1) {
    lam1 = *c.lambda1;
    lam2 = *c.lambda2;
    p.selection = {{"source", "config"}};
  } else {
    if (A.rows() < c.grid.folds) throw ConfigError("fewer measurements than cross-validation folds");
    p.W = design_W(A, default_design_levels(A.rows(), A.cols()));
    const auto cov = covariance_diagonals(p.W->W, A, p.sigma);
    const Vector clean = p.inst.A_hat.entries() * p.inst.beta_star.values();
    GateContext ctx{&p.W->W, &cov, [&](int k) {
                      Rng rng(derive_seed(c.params.seed, {12, std::uint64_t(k)}));
                      return Vector(clean + gen_noise(A.rows(), p.inst.sigma, rng));
                    }};
    const auto sel = select_lambdas(y, A, ctx, c.grid, derive_seed(c.params.seed, {16}));
    lam1 = sel.lambda1;
    lam2 = sel.lambda2;
    p.selection = {{"source", "cross_validation"}, {"cv_error", sel.cv_error},
                   {"gate_beta_pass", sel.gate.beta_pass}, {"gate_delta_pass", sel.gate.delta_pass},
                   {"gate_evaluations", sel.gate_evaluations}, {"fallback", sel.fallback}};
  }
  if (need_W && !p.W) p.W = design_W(A, default_design_levels(A.rows(), A.cols()));
  p.fit = fit_robust(y, A, lam1, lam2);
  return p;
}

int finish(const RobustLassoFit& fit) {
  if (fit.converged) return 0;
  std::cerr << "error: robust Lasso did not converge (KKT residual " << fit.kkt_residual << ")\n";
  return kNumericalError;
}

int cmd_gen(const Options& o) {
  const auto c = instance_config(o);
  const auto inst = load_instance(c);
  const fs::path out(o.out);
  write_text_file(out / "instance.json", instance_to_json(inst).dump() + "\n");
  write_text_file(out / "A.csv", matrix_csv(inst.A.entries()));
  write_text_file(out / "A_hat.csv", matrix_csv(inst.A_hat.entries()));
  write_text_file(out / "beta_star.csv", vector_csv(inst.beta_star.values(), "beta_star"));
  write_text_file(out / "delta_star.csv", vector_csv(inst.delta_star.values(), "delta_star"));
  write_text_file(out / "y.csv", vector_csv(inst.y.values, "y"));
  json meta = base_meta("gen", c);
  meta["instance"] = {{"n", inst.n()}, {"p", inst.p()}, {"sigma", inst.sigma},
                      {"sparsity", inst.beta_star.sparsity()}, {"mme_count", inst.delta_star.sparsity()}};
  write_text_file(out / "gen_meta.json", meta.dump(2) + "\n");
  return 0;
}

int cmd_fit(const Options& o) {
  const auto c = instance_config(o);
  const auto p = prepare(c, false);
  const fs::path out(o.out);
  write_text_file(out / "beta_hat.csv", vector_csv(p.fit.beta_hat, "beta_hat"));
  write_text_file(out / "delta_hat.csv", vector_csv(p.fit.delta_hat, "delta_hat"));
  json meta = base_meta("fit", c);
  meta["selection"] = p.selection;
  meta["fit"] = fit_json(p.fit);
  write_text_file(out / "fit_meta.json", meta.dump(2) + "\n");
  return finish(p.fit);
}

std::string report_csv(const std::string& estimate_name, const Vector& estimate,
                       const std::vector<std::pair<std::string, const Vector*>>& debiased,
                       const std::vector<const TestReport*>& reports) {
  std::string out = "index," + estimate_name;
  for (std::size_t m = 0; m < debiased.size(); ++m)
    out += ",debiased_" + debiased[m].first + ",statistic_" + debiased[m].first + ",reject_" + debiased[m].first;
  out += "\n";
  for (Index i = 0; i < estimate.size(); ++i) {
    out += std::to_string(i) + "," + format_double(estimate(i));
    for (std::size_t m = 0; m < debiased.size(); ++m)
      out += "," + format_double((*debiased[m].second)(i)) + "," + format_double(reports[m]->statistics(i)) + "," +
             (reports[m]->decisions[std::size_t(i)] ? "1" : "0");
    out += "\n";
  }
  return out;
}

int cmd_test(const Options& o) {
  const auto c = instance_config(o);
  const bool want_drlt = c.method != "odrlt", want_odrlt = c.method != "drlt";
  const auto p = prepare(c, want_odrlt);
  const Matrix& A = p.inst.A.entries();
  const Vector& y = p.inst.y.values;
  std::optional<DebiasedTests> d, od;
  if (want_drlt) d = run_debiased_tests(p.fit, A, y, A, covariance_diagonals(A, A, p.sigma), p.sigma, c.alpha, false);
  if (want_odrlt)
    od = run_debiased_tests(p.fit, p.W->W, y, A, covariance_diagonals(p.W->W, A, p.sigma), p.sigma, c.alpha, true);

  std::vector<std::pair<std::string, const Vector*>> beta_cols, delta_cols;
  std::vector<const TestReport*> beta_reps, delta_reps;
  json tests = json::object();
  for (const auto& [name, t] : {std::pair<std::string, const std::optional<DebiasedTests>*>{"drlt", &d},
                                std::pair<std::string, const std::optional<DebiasedTests>*>{"odrlt", &od}}) {
    if (!*t) continue;
    const auto& r = **t;
    beta_cols.emplace_back(name, &r.beta_W);
    delta_cols.emplace_back(name, &r.delta_W);
    beta_reps.push_back(&r.beta);
    delta_reps.push_back(&r.delta);
    tests[name] = {{"threshold", r.beta.threshold},
                   {"beta_rejections", r.beta.rejections()},
                   {"delta_rejections", r.delta.rejections()}};
  }
  const fs::path out(o.out);
  write_text_file(out / "test_beta.csv", report_csv("beta_hat", p.fit.beta_hat, beta_cols, beta_reps));
  write_text_file(out / "test_delta.csv", report_csv("delta_hat", p.fit.delta_hat, delta_cols, delta_reps));
  json meta = base_meta("test", c);
  meta["sigma"] = p.sigma;
  meta["selection"] = p.selection;
  meta["fit"] = fit_json(p.fit);
  meta["tests"] = tests;
  if (p.W)
    meta["weights"] = {{"source", to_string(p.W->source)}, {"objective", p.W->objective},
                       {"constraint_residual", p.W->constraint_residuals.max()}};
  write_text_file(out / "test_meta.json", meta.dump(2) + "\n");
  return finish(p.fit);
}

int cmd_experiment(const Options& o, ExperimentId id) {
  auto cfg = config_from_json(load_config(o), id, o.full);
  if (o.seed) cfg.seed = *o.seed;
  Engine engine(o.quiet ? Engine::Logger{} : Engine::Logger([](const std::string& s) { std::cerr << s << "\n"; }));
  const auto r = engine.run(cfg);
  write_outputs(r, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Debiased robust Lasso tests for pooled measurements with model mismatch"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the configured seed");
    sub->add_flag("--full", o.full, "Use the full-scale profile instead of the desk profile");
    sub->add_flag("-q,--quiet", o.quiet, "Suppress progress messages");
    return sub;
  };
  auto* gen = add("gen", "Generate a problem instance");
  auto* fit = add("fit", "Fit the robust Lasso on an instance");
  auto* test = add("test", "Run DRLT/ODRLT on an instance");
  const std::vector<std::pair<CLI::App*, ExperimentId>> experiments{
      {add("table1", "Sensitivity/specificity table over n"), ExperimentId::table1},
      {add("suite-delta", "MME detection sweeps"), ExperimentId::delta_suite},
      {add("suite-beta", "Signal detection sweeps"), ExperimentId::beta_suite},
      {add("suite-rrmse", "Estimation error sweeps"), ExperimentId::rrmse_suite},
      {add("qq", "Quantile pairs of the debiased statistics"), ExperimentId::qq_export}};

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed")) o.seed = seed;

  try {
    if (*gen) return cmd_gen(o);
    if (*fit) return cmd_fit(o);
    if (*test) return cmd_test(o);
    for (const auto& [sub, id] : experiments)
      if (*sub) return cmd_experiment(o, id);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
