// Copyright 2026 The qmac Authors
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

#ifndef QMAC_MATRIX_JSON_H
#define QMAC_MATRIX_JSON_H

#include <string>
#include <string_view>

#include "json.hpp"
#include "qmac/matrix.h"

namespace qmac {

/// {"rows": n, "cols": m, "data": [[re, im], ...]}, row-major.
nlohmann::json matrix_to_json(const ComplexMatrix& m);

/// Throws std::invalid_argument naming the offending field or entry.
ComplexMatrix matrix_from_json(const nlohmann::json& j);

/// Parses text; syntax errors come back as std::invalid_argument carrying the
/// byte offset reported by the parser.
ComplexMatrix parse_matrix(std::string_view text);
ComplexMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const ComplexMatrix& m);

/// Lowercase hex SHA-256 of the canonical serialization (matrix_to_json().dump()).
std::string matrix_hash(const ComplexMatrix& m);

}  // namespace qmac

#endif
