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

#include "drlt/harness/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace drlt::harness {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string vector_csv(const Vector& v, const std::string& name) {
  std::string out = "index," + name + "\n";
  for (Index i = 0; i < v.size(); ++i) out += std::to_string(i) + "," + format_double(v(i)) + "\n";
  return out;
}

Matrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw DomainError("parse_matrix_csv: bad number in '" + line + "'");
      row.push_back(v);
      p = res.ptr;
      if (p < end && *p == ',') ++p;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DimensionError("parse_matrix_csv: ragged rows");
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)];
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  auto j = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    j.push_back(std::move(row));
  }
  return j;
}

nlohmann::json vector_to_json(const Vector& v) {
  auto j = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DomainError("matrix_from_json: expected an array of rows");
  const Index n = static_cast<Index>(j.size());
  const Index p = n ? static_cast<Index>(j.at(0).size()) : 0;
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i) {
    const auto& row = j.at(std::size_t(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != p)
      throw DimensionError("matrix_from_json: ragged rows");
    for (Index c = 0; c < p; ++c) m(i, c) = row.at(std::size_t(c)).get<double>();
  }
  return m;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DomainError("vector_from_json: expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j.at(std::size_t(i)).get<double>();
  return v;
}

nlohmann::json instance_to_json(const ProblemInstance& inst) {
  return {{"A", matrix_to_json(inst.A.entries())},
          {"A_hat", matrix_to_json(inst.A_hat.entries())},
          {"beta_star", vector_to_json(inst.beta_star.values())},
          {"delta_star", vector_to_json(inst.delta_star.values())},
          {"y", vector_to_json(inst.y.values)},
          {"sigma", inst.sigma}};
}

ProblemInstance instance_from_json(const nlohmann::json& j) {
  for (const char* key : {"A", "A_hat", "beta_star", "delta_star", "y", "sigma"})
    if (!j.contains(key)) throw DomainError(std::string("instance bundle: missing key '") + key + "'");
  RademacherMatrix A(matrix_from_json(j.at("A")));
  RademacherMatrix A_hat(matrix_from_json(j.at("A_hat")));
  SignalVector beta(vector_from_json(j.at("beta_star")));
  MMEVector delta(vector_from_json(j.at("delta_star")));
  const Vector y = vector_from_json(j.at("y"));
  const double sigma = j.at("sigma").get<double>();
  require_dims(A.rows() == A_hat.rows() && A.cols() == A_hat.cols(), "instance bundle: A and A_hat differ in shape");
  require_dims(beta.size() == A.cols() && delta.size() == A.rows() && y.size() == A.rows(),
               "instance bundle: vector lengths do not match A");
  if (!(sigma >= 0.0)) throw DomainError("instance bundle: sigma must be non-negative");
  return ProblemInstance{std::move(A), std::move(A_hat), std::move(beta), std::move(delta),
                         MeasurementVector{y, sigma}, sigma};
}

}  // namespace drlt::harness
