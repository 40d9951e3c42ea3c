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

#include "drlt/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace drlt::harness {
namespace {

using nlohmann::json;

std::vector<double> steps(double first, double step, int count) {
  std::vector<double> v;
  for (int k = 0; k < count; ++k) v.push_back(first + step * k);
  return v;
}

std::vector<double> fractions(int first, int last, int step) {
  std::vector<double> v;
  for (int k = first; k <= last; k += step) v.push_back(static_cast<double>(k) / 100.0);
  return v;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::uint64_t get_seed(const json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

void overlay_params(GenParams& g, const json& j, const std::string& where, bool allow_seed) {
  std::set<std::string> keys{"p", "n", "f_sp", "f_adv", "f_sigma"};
  if (allow_seed) keys.insert("seed");
  check_keys(j, keys, where);
  if (j.contains("p")) g.p = get<Index>(j, "p", where);
  if (j.contains("n")) g.n = get<Index>(j, "n", where);
  if (j.contains("f_sp")) g.f_sp = get<double>(j, "f_sp", where);
  if (j.contains("f_adv")) g.f_adv = get<double>(j, "f_adv", where);
  if (j.contains("f_sigma")) g.f_sigma = get<double>(j, "f_sigma", where);
  if (j.contains("seed")) g.seed = get_seed(j, "seed", where);
}

void overlay_grid(LambdaGrid& g, const json& j) {
  const std::string where = "selection";
  check_keys(j, {"log_lambda", "folds", "gate_redraws", "gate_fraction", "gate_alpha",
                 "gate_max_candidates", "cv_kkt_tol"},
             where);
  if (j.contains("log_lambda")) {
    const auto& r = j.at("log_lambda");
    if (r.is_array()) {
      g.log_values = get<std::vector<double>>(j, "log_lambda", where);
    } else {
      check_keys(r, {"lo", "hi", "step"}, where + ".log_lambda");
      const double lo = get<double>(r, "lo", where), hi = get<double>(r, "hi", where),
                   step = get<double>(r, "step", where);
      if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("selection.log_lambda: need step > 0 and hi >= lo");
      g.log_values = LambdaGrid::range(lo, hi, step).log_values;
    }
  }
  if (j.contains("folds")) g.folds = get<int>(j, "folds", where);
  if (j.contains("gate_redraws")) g.gate_redraws = get<int>(j, "gate_redraws", where);
  if (j.contains("gate_fraction")) g.gate_fraction = get<double>(j, "gate_fraction", where);
  if (j.contains("gate_alpha")) g.gate_alpha = get<double>(j, "gate_alpha", where);
  if (j.contains("gate_max_candidates")) g.gate_max_candidates = get<int>(j, "gate_max_candidates", where);
  if (j.contains("cv_kkt_tol")) g.cv_kkt_tol = get<double>(j, "cv_kkt_tol", where);
}

LambdaGrid profile_grid(bool full) {
  LambdaGrid g = LambdaGrid::range(1.0, 7.0, full ? 0.25 : 1.0);
  g.folds = full ? 10 : 5;
  g.gate_redraws = full ? 100 : 30;
  g.gate_max_candidates = full ? 625 : 8;
  return g;
}

json grid_json(const LambdaGrid& g) {
  return {{"log_lambda", g.log_values},       {"folds", g.folds},
          {"gate_redraws", g.gate_redraws},   {"gate_fraction", g.gate_fraction},
          {"gate_alpha", g.gate_alpha},       {"gate_max_candidates", g.gate_max_candidates},
          {"cv_kkt_tol", g.cv_kkt_tol}};
}

json params_json(const GenParams& g) {
  return {{"p", g.p}, {"n", g.n}, {"f_sp", g.f_sp}, {"f_adv", g.f_adv}, {"f_sigma", g.f_sigma}};
}

}  // namespace

const char* to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::table1: return "table1";
    case ExperimentId::delta_suite: return "delta_suite";
    case ExperimentId::beta_suite: return "beta_suite";
    case ExperimentId::rrmse_suite: return "rrmse_suite";
    case ExperimentId::qq_export: return "qq_export";
  }
  return "?";
}

ExperimentId experiment_from_string(const std::string& s) {
  for (auto id : {ExperimentId::table1, ExperimentId::delta_suite, ExperimentId::beta_suite,
                  ExperimentId::rrmse_suite, ExperimentId::qq_export})
    if (s == to_string(id)) return id;
  throw ConfigError("unknown experiment '" + s + "'");
}

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::f_adv: return "f_adv";
    case SweepParameter::n: return "n";
    case SweepParameter::f_sigma: return "f_sigma";
    case SweepParameter::f_sp: return "f_sp";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  for (auto p : {SweepParameter::f_adv, SweepParameter::n, SweepParameter::f_sigma, SweepParameter::f_sp})
    if (s == to_string(p)) return p;
  throw ConfigError("unknown sweep parameter '" + s + "'");
}

GenParams at_point(const GenParams& fixed, SweepParameter parameter, double value) {
  GenParams g = fixed;
  switch (parameter) {
    case SweepParameter::f_adv: g.f_adv = value; break;
    case SweepParameter::n: g.n = static_cast<Index>(std::llround(value)); break;
    case SweepParameter::f_sigma: g.f_sigma = value; break;
    case SweepParameter::f_sp: g.f_sp = value; break;
  }
  return g;
}

std::vector<Sweep> default_sweeps(ExperimentId id) {
  const auto fadv = fractions(1, 10, 1), n = steps(200, 50, 7), fsig = fractions(0, 50, 5),
             fsp = fractions(1, 10, 1);
  switch (id) {
    case ExperimentId::table1:
      return {{"table1", SweepParameter::n, steps(100, 100, 5)}};
    case ExperimentId::delta_suite:
      return {{"E1", SweepParameter::f_adv, fadv}, {"E2", SweepParameter::n, n},
              {"E3", SweepParameter::f_sigma, fsig}, {"E4", SweepParameter::f_sp, fsp}};
    case ExperimentId::beta_suite:
      return {{"EA", SweepParameter::f_adv, fadv}, {"EB", SweepParameter::n, n},
              {"EC", SweepParameter::f_sigma, fsig}, {"ED", SweepParameter::f_sp, fsp}};
    case ExperimentId::rrmse_suite:
      return {{"R1", SweepParameter::f_adv, fadv}, {"R2", SweepParameter::n, n},
              {"R3", SweepParameter::f_sigma, fsig}, {"R4", SweepParameter::f_sp, fsp}};
    case ExperimentId::qq_export:
      return {};
  }
  return {};
}

ExperimentConfig default_config(ExperimentId id, bool full) {
  ExperimentConfig c;
  c.id = id;
  c.sweeps = default_sweeps(id);
  c.full = full;
  c.runs = full ? 100 : 20;
  c.grid = profile_grid(full);
  c.ransac.subsets = full ? 500 : 10;
  if (id == ExperimentId::qq_export) {
    c.fixed.f_adv = c.fixed.f_sp = c.fixed.f_sigma = 0.01;
    c.runs = 100;
  }
  return c;
}

void ExperimentConfig::validate() const {
  try {
    fixed.validate();
    grid.validate();
    ransac.validate();
    for (const auto& s : sweeps)
      for (double v : s.values) at_point(fixed, s.parameter, v).validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (id == ExperimentId::qq_export && runs < 5) throw ConfigError("qq export needs at least 5 runs");
  if (id != ExperimentId::qq_export && sweeps.empty()) throw ConfigError("no sweeps configured");
  for (const auto& s : sweeps) {
    if (s.values.empty()) throw ConfigError("sweep " + s.label + " has no values");
    if (s.parameter == SweepParameter::n)
      for (double v : s.values)
        if (v != std::round(v) || v < grid.folds) throw ConfigError("sweep " + s.label + ": invalid n");
  }
  const Index min_n = [&] {
    Index m = fixed.n;
    for (const auto& s : sweeps)
      if (s.parameter == SweepParameter::n)
        for (double v : s.values) m = std::min(m, static_cast<Index>(v));
    return m;
  }();
  if (min_n < grid.folds) throw ConfigError("fewer measurements than cross-validation folds");
}

json ExperimentConfig::to_json() const {
  json sw = json::array();
  for (const auto& s : sweeps)
    sw.push_back({{"label", s.label}, {"parameter", to_string(s.parameter)}, {"values", s.values}});
  json fixed_json = params_json(fixed);
  for (const auto& s : sweeps) fixed_json.erase(to_string(s.parameter));
  return {{"experiment", to_string(id)},
          {"sweeps", sw},
          {"fixed", fixed_json},
          {"runs", runs},
          {"alpha", alpha},
          {"seed", seed},
          {"selection", grid_json(grid)},
          {"ransac", {{"subsets", ransac.subsets}, {"subset_fraction", ransac.subset_fraction}}},
          {"full", full}};
}

ExperimentConfig config_from_json(const json& j, ExperimentId id, bool full) {
  check_keys(j, {"experiment", "sweeps", "suites", "fixed", "runs", "alpha", "seed", "selection",
                 "ransac", "full"},
             "config");
  if (j.contains("experiment") && experiment_from_string(get<std::string>(j, "experiment", "config")) != id)
    throw ConfigError("config is for experiment '" + j.at("experiment").get<std::string>() +
                      "', not '" + to_string(id) + "'");
  if (j.contains("full")) full = full || get<bool>(j, "full", "config");
  ExperimentConfig c = default_config(id, full);
  std::set<std::string> fixed_keys;
  if (j.contains("fixed")) {
    overlay_params(c.fixed, j.at("fixed"), "fixed", false);
    for (const auto& [k, v] : j.at("fixed").items()) fixed_keys.insert(k);
  }
  if (j.contains("seed")) c.seed = get_seed(j, "seed", "config");
  if (j.contains("runs")) c.runs = get<int>(j, "runs", "config");
  if (j.contains("alpha")) c.alpha = get<double>(j, "alpha", "config");
  if (j.contains("selection")) overlay_grid(c.grid, j.at("selection"));
  if (j.contains("ransac")) {
    const auto& r = j.at("ransac");
    check_keys(r, {"subsets", "subset_fraction"}, "ransac");
    if (r.contains("subsets")) c.ransac.subsets = get<int>(r, "subsets", "ransac");
    if (r.contains("subset_fraction")) c.ransac.subset_fraction = get<double>(r, "subset_fraction", "ransac");
  }
  if (j.contains("suites")) {
    const auto wanted = get<std::vector<std::string>>(j, "suites", "config");
    std::vector<Sweep> kept;
    for (const auto& w : wanted) {
      const auto it = std::find_if(c.sweeps.begin(), c.sweeps.end(), [&](const Sweep& s) { return s.label == w; });
      if (it == c.sweeps.end()) throw ConfigError("unknown suite '" + w + "' for " + to_string(id));
      kept.push_back(*it);
    }
    c.sweeps = kept;
  }
  if (j.contains("sweeps")) {
    if (!j.at("sweeps").is_array()) throw ConfigError("sweeps: expected an array");
    c.sweeps.clear();
    for (const auto& s : j.at("sweeps")) {
      check_keys(s, {"label", "parameter", "values"}, "sweeps[]");
      Sweep sw;
      sw.parameter = sweep_parameter_from_string(get<std::string>(s, "parameter", "sweeps[]"));
      sw.label = s.contains("label") ? get<std::string>(s, "label", "sweeps[]") : to_string(sw.parameter);
      sw.values = get<std::vector<double>>(s, "values", "sweeps[]");
      c.sweeps.push_back(std::move(sw));
    }
  }
  for (const auto& s : c.sweeps)
    if (fixed_keys.count(to_string(s.parameter)))
      throw ConfigError(std::string("parameter '") + to_string(s.parameter) + "' is both swept and fixed");
  c.validate();
  return c;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

InstanceConfig instance_config_from_json(const json& j, bool full) {
  check_keys(j, {"instance_file", "params", "seed", "lambda1", "lambda2", "alpha", "method",
                 "selection", "full"},
             "config");
  if (j.contains("full")) full = full || get<bool>(j, "full", "config");
  InstanceConfig c;
  c.grid = profile_grid(full);
  if (j.contains("instance_file")) c.instance_file = get<std::string>(j, "instance_file", "config");
  if (j.contains("params")) overlay_params(c.params, j.at("params"), "params", true);
  if (j.contains("seed")) c.params.seed = get_seed(j, "seed", "config");
  if (j.contains("lambda1")) c.lambda1 = get<double>(j, "lambda1", "config");
  if (j.contains("lambda2")) c.lambda2 = get<double>(j, "lambda2", "config");
  if (j.contains("alpha")) c.alpha = get<double>(j, "alpha", "config");
  if (j.contains("method")) c.method = get<std::string>(j, "method", "config");
  if (j.contains("selection")) overlay_grid(c.grid, j.at("selection"));
  if (c.lambda1.has_value() != c.lambda2.has_value())
    throw ConfigError("lambda1 and lambda2 must be given together");
  if (c.lambda1 && !(*c.lambda1 > 0.0 && *c.lambda2 > 0.0)) throw ConfigError("lambdas must be positive");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (c.method != "drlt" && c.method != "odrlt" && c.method != "both")
    throw ConfigError("method must be drlt, odrlt or both");
  try {
    c.params.validate();
    c.grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json to_json(const InstanceConfig& c) {
  json j = {{"params", params_json(c.params)}, {"seed", c.params.seed}, {"alpha", c.alpha},
            {"method", c.method}, {"selection", grid_json(c.grid)}};
  if (c.instance_file) j["instance_file"] = *c.instance_file;
  if (c.lambda1) {
    j["lambda1"] = *c.lambda1;
    j["lambda2"] = *c.lambda2;
  }
  return j;
}

}  // namespace drlt::harness
