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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "drlt/harness/config.hpp"
#include "drlt/harness/experiment.hpp"
#include "drlt/harness/io.hpp"
#include "drlt/harness/metrics.hpp"
#include "helpers.hpp"

namespace drlt::harness {
namespace {

using nlohmann::json;

TEST(Metrics, SensitivitySpecificityExamples) {
  const auto d = sensitivity_specificity({true, false, true}, {true, false, false});
  EXPECT_DOUBLE_EQ(*d.sensitivity, 1.0);
  EXPECT_DOUBLE_EQ(*d.specificity, 0.5);
  const auto none = sensitivity_specificity({true, false}, {false, false});
  EXPECT_FALSE(none.sensitivity.has_value());
  EXPECT_DOUBLE_EQ(*none.specificity, 0.5);
  const auto all = sensitivity_specificity({false, false}, {true, true});
  EXPECT_DOUBLE_EQ(*all.sensitivity, 0.0);
  EXPECT_FALSE(all.specificity.has_value());
  EXPECT_THROW(sensitivity_specificity({true}, {true, false}), DimensionError);
}

TEST(Metrics, Rrmse) {
  Vector star(2), hat(2);
  star << 3.0, 4.0;
  hat << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(rrmse(hat, star), 0.0);
  hat << 0.0, 0.0;
  EXPECT_DOUBLE_EQ(rrmse(hat, star), 1.0);
  hat << 6.0, 8.0;
  EXPECT_DOUBLE_EQ(rrmse(hat, star), 1.0);
  EXPECT_THROW(rrmse(hat, Vector::Zero(2)), DomainError);
}

TEST(Metrics, QQPairs) {
  const auto same = qq_pairs({2.0, 2.0, 2.0, 2.0});
  ASSERT_EQ(same.size(), 4u);
  for (const auto& q : same) EXPECT_EQ(q.empirical, 2.0);
  EXPECT_NEAR(same[0].theoretical, -same[3].theoretical, 1e-12);
  EXPECT_NEAR(same[1].theoretical + same[2].theoretical, 0.0, 1e-12);
  EXPECT_THROW(qq_pairs({1.0}), DomainError);

  const Vector z = testing::random_normal_vector(10000, 42);
  const auto pairs = qq_pairs(std::vector<double>(z.data(), z.data() + z.size()));
  double worst = 0.0;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    EXPECT_LE(pairs[k - 1].empirical, pairs[k].empirical);
    EXPECT_LT(pairs[k - 1].theoretical, pairs[k].theoretical);
    if (std::abs(pairs[k].theoretical) <= 2.0)
      worst = std::max(worst, std::abs(pairs[k].theoretical - pairs[k].empirical));
  }
  EXPECT_LT(worst, 0.08);
}

TEST(Metrics, Summarize) {
  const auto s = summarize({1.0, std::nullopt, 3.0});
  EXPECT_EQ(s.count, 2);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_NEAR(s.se, std::sqrt(2.0) / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(summarize({std::nullopt}).count, 0);
  EXPECT_DOUBLE_EQ(summarize({5.0}).se, 0.0);
}

TEST(FlagDiscard, NothingFlaggedIsFullFit) {
  const Matrix A = testing::random_normal_matrix(25, 8, 3);
  const Vector y = A * testing::sparse_vector(8, {{2, 4.0}}) + testing::random_normal_vector(25, 4, 0.1);
  TestReport rep;
  rep.decisions.assign(25, false);
  const auto full = fit_robust(y, A, 2.0, 3.0);
  const auto refit = flag_discard_refit(y, A, rep, 2.0, 3.0);
  EXPECT_EQ(refit.beta_hat, full.beta_hat);
  rep.decisions.assign(25, true);
  EXPECT_THROW(flag_discard_refit(y, A, rep, 2.0, 3.0), DomainError);
  rep.decisions.assign(24, false);
  EXPECT_THROW(flag_discard_refit(y, A, rep, 2.0, 3.0), DimensionError);
}

TEST(FlagDiscard, DroppingExactMmeRowsRecoversSignal) {
  const Matrix A = testing::random_normal_matrix(40, 10, 5);
  const Vector beta = testing::sparse_vector(10, {{1, 6.0}, {7, -3.0}});
  Vector y = A * beta;
  y(2) += 50.0;
  y(5) -= 40.0;
  TestReport rep;
  rep.decisions.assign(40, false);
  rep.decisions[2] = rep.decisions[5] = true;
  const auto refit = flag_discard_refit(y, A, rep, 1e-4, 1e4);
  EXPECT_LT(rrmse(refit.beta_hat, beta), 1e-4);
  EXPECT_GT(rrmse(fit_robust(y, A, 1e-4, 1e4).beta_hat, beta), 1e-2);
}

TEST(EffectiveSigma, PositiveFloor) {
  Vector y(2);
  y << 2.0, -4.0;
  EXPECT_DOUBLE_EQ(effective_sigma(0.5, y), 0.5);
  EXPECT_DOUBLE_EQ(effective_sigma(0.0, y), 3e-3);
  EXPECT_GT(effective_sigma(0.0, Vector::Zero(3)), 0.0);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 0.0})
    EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.25), "0.25");
}

TEST(Io, MatrixCsvRoundTrip) {
  const Matrix m = testing::random_normal_matrix(3, 4, 9);
  const std::string text = matrix_csv(m);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(parse_matrix_csv(text), m);
  Vector v(2);
  v << 1.5, -2.0;
  EXPECT_EQ(vector_csv(v, "beta_hat"), "index,beta_hat\n0,1.5\n1,-2\n");
}

TEST(Io, InstanceJsonRoundTrip) {
  GenParams g;
  g.p = 30;
  g.n = 20;
  g.f_sp = 0.1;
  g.f_adv = 0.1;
  const auto inst = gen_instance(g);
  const json j = instance_to_json(inst);
  for (const char* k : {"A", "A_hat", "beta_star", "delta_star", "y", "sigma"}) EXPECT_TRUE(j.contains(k)) << k;
  const auto back = instance_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.A.entries(), inst.A.entries());
  EXPECT_EQ(back.A_hat.entries(), inst.A_hat.entries());
  EXPECT_EQ(back.beta_star.values(), inst.beta_star.values());
  EXPECT_EQ(back.delta_star.values(), inst.delta_star.values());
  EXPECT_EQ(back.y.values, inst.y.values);
  EXPECT_EQ(back.sigma, inst.sigma);
  json bad = j;
  bad.erase("y");
  EXPECT_THROW(instance_from_json(bad), std::exception);
  bad = j;
  bad["y"] = vector_to_json(Vector::Zero(3));
  EXPECT_THROW(instance_from_json(bad), std::exception);
}

TEST(Config, DefaultsAndProfiles) {
  const auto desk = default_config(ExperimentId::delta_suite);
  EXPECT_EQ(desk.sweeps.size(), 4u);
  EXPECT_EQ(desk.runs, 20);
  const auto full = default_config(ExperimentId::delta_suite, true);
  EXPECT_EQ(full.runs, 100);
  EXPECT_EQ(full.grid.log_values.size(), 25u);
  EXPECT_EQ(full.grid.folds, 10);
  EXPECT_EQ(full.ransac.subsets, 500);
  const auto t1 = default_config(ExperimentId::table1);
  ASSERT_EQ(t1.sweeps.size(), 1u);
  EXPECT_EQ(t1.sweeps[0].values, (std::vector<double>{100, 200, 300, 400, 500}));
  const auto eb = default_sweeps(ExperimentId::beta_suite)[1];
  EXPECT_EQ(eb.label, "EB");
  EXPECT_EQ(eb.values.front(), 200.0);
  EXPECT_EQ(eb.values.back(), 500.0);
  EXPECT_EQ(default_sweeps(ExperimentId::rrmse_suite)[2].values.size(), 11u);
}

TEST(Config, JsonOverlayAndRoundTrip) {
  const json j = parse_json_text(R"({"runs": 3, "seed": 9, "suites": ["E2"],
      "fixed": {"p": 60}, "selection": {"log_lambda": {"lo": 1, "hi": 3, "step": 1}, "folds": 3}})");
  const auto c = config_from_json(j, ExperimentId::delta_suite);
  EXPECT_EQ(c.runs, 3);
  EXPECT_EQ(c.seed, 9u);
  ASSERT_EQ(c.sweeps.size(), 1u);
  EXPECT_EQ(c.sweeps[0].label, "E2");
  EXPECT_EQ(c.fixed.p, 60);
  EXPECT_EQ(c.grid.log_values, (std::vector<double>{1, 2, 3}));
  const auto again = config_from_json(c.to_json(), ExperimentId::delta_suite);
  EXPECT_EQ(again.to_json(), c.to_json());
}

TEST(Config, Errors) {
  const auto bad = [](const char* text) {
    EXPECT_THROW(config_from_json(parse_json_text(text), ExperimentId::delta_suite), ConfigError) << text;
  };
  bad(R"({"bogus": 1})");
  bad(R"({"runs": 0})");
  bad(R"({"runs": "many"})");
  bad(R"({"alpha": 1.5})");
  bad(R"({"seed": -1})");
  bad(R"({"experiment": "table1"})");
  bad(R"({"suites": ["EA"]})");
  bad(R"({"fixed": {"f_adv": 0.02}})");
  bad(R"({"fixed": {"p": 0}, "suites": ["E1"]})");
  bad(R"({"selection": {"folds": 1}})");
  bad(R"({"selection": {"log_lambda": {"lo": 3, "hi": 1, "step": 1}}})");
  bad(R"({"sweeps": [{"parameter": "n", "values": [2.5]}]})");
  bad(R"({"sweeps": [{"parameter": "q", "values": [1]}]})");
  bad(R"({"ransac": {"subsets": 0}})");
  EXPECT_THROW(parse_json_text("{"), ConfigError);
  EXPECT_THROW(instance_config_from_json(json{{"lambda1", 1.0}}), ConfigError);
  EXPECT_THROW(instance_config_from_json(json{{"method", "x"}}), ConfigError);
  const auto ic = instance_config_from_json(json{{"seed", 4}, {"params", {{"n", 50}}}});
  EXPECT_EQ(ic.params.seed, 4u);
  EXPECT_EQ(ic.params.n, 50);
}

ExperimentConfig tiny(ExperimentId id) {
  auto c = default_config(id);
  c.fixed.p = 40;
  c.fixed.n = 30;
  c.fixed.f_sp = 0.1;
  c.fixed.f_adv = 0.1;
  c.runs = 2;
  c.grid.log_values = {1.0, 3.0};
  c.grid.folds = 3;
  c.grid.gate_redraws = 5;
  c.grid.gate_max_candidates = 2;
  c.ransac.subsets = 2;
  c.sweeps = {{"S", SweepParameter::f_sigma, {0.0, 0.1}}};
  return c;
}

TEST(Engine, AggregateMatchesRecordsAndIsDeterministic) {
  Engine e;
  for (auto id : {ExperimentId::delta_suite, ExperimentId::beta_suite, ExperimentId::rrmse_suite,
                  ExperimentId::table1}) {
    const auto cfg = tiny(id);
    const auto r = e.run(cfg);
    EXPECT_EQ(ResultTable::aggregate(r.records).csv(), r.table.csv());
    for (const auto& row : r.table.rows) EXPECT_EQ(row.runs, 2);
    const auto fresh = run_experiment(cfg);
    EXPECT_EQ(fresh.table.csv(), r.table.csv()) << to_string(id);
    EXPECT_EQ(fresh.meta.dump(), r.meta.dump());
    for (const auto& rec : r.records) {
      if (rec.sensitivity) EXPECT_TRUE(*rec.sensitivity >= 0.0 && *rec.sensitivity <= 1.0);
      if (rec.rrmse) EXPECT_GE(*rec.rrmse, 0.0);
    }
  }
  const auto delta = e.run(tiny(ExperimentId::delta_suite));
  for (const char* m : {"DRLT", "ODRLT", "RL"}) EXPECT_NE(delta.table.find("S", 0.1, m), nullptr) << m;
  const auto rr = e.run(tiny(ExperimentId::rrmse_suite));
  for (const char* m : {"RL", "DRL", "ODRL", "L2", "L1", "RL1", "RL2"}) EXPECT_NE(rr.table.find("S", 0.1, m), nullptr) << m;
}

TEST(Engine, WriteOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "drlt_harness_test";
  std::filesystem::remove_all(dir);
  auto cfg = tiny(ExperimentId::qq_export);
  cfg.sweeps.clear();
  cfg.runs = 6;
  const auto r = run_experiment(cfg);
  ASSERT_TRUE(r.qq.has_value());
  EXPECT_EQ(r.qq->t_beta.rows(), 6);
  EXPECT_EQ(r.qq->t_delta.cols(), 30);
  write_outputs(r, dir);
  for (const char* f : {"qq_export.csv", "qq_export_runs.jsonl", "qq_export_meta.json", "qq_beta.csv", "qq_delta.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const auto meta = read_text_file(dir / "qq_export_meta.json");
  EXPECT_EQ(meta.find("time"), std::string::npos);
  EXPECT_NO_THROW(json::parse(meta));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace drlt::harness
