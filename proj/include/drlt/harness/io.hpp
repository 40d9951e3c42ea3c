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

// Serialisation: CSV matrices and vectors, the JSON instance bundle and
// byte-stable text output.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "drlt/linmodel.hpp"
#include "drlt/types.hpp"

namespace drlt::harness {

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// Writes exactly `text` (no newline translation), creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// One line per matrix row, comma separated, no header.
std::string matrix_csv(const Matrix& m);
// Header "index,<name>" followed by one line per entry.
std::string vector_csv(const Vector& v, const std::string& name);
Matrix parse_matrix_csv(const std::string& text);

// {"A", "A_hat", "beta_star", "delta_star", "y", "sigma"}; matrices as arrays
// of rows.
nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json vector_to_json(const Vector& v);
Matrix matrix_from_json(const nlohmann::json& j);
Vector vector_from_json(const nlohmann::json& j);

}  // namespace drlt::harness
