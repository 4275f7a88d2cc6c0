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

#include "qmac/matrix_json.h"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace qmac {

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json data = nlohmann::json::array();
    for (const auto& z : m.data()) {
        data.push_back({z.real(), z.imag()});
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("matrix JSON: expected an object");
    }
    for (const char* key : {"rows", "cols", "data"}) {
        if (!j.contains(key)) {
            throw std::invalid_argument(std::string("matrix JSON: missing field '") + key + "'");
        }
    }
    const auto& jr = j.at("rows");
    const auto& jc = j.at("cols");
    if (!jr.is_number_unsigned() || !jc.is_number_unsigned() || jr.get<std::size_t>() == 0 ||
        jc.get<std::size_t>() == 0) {
        throw std::invalid_argument("matrix JSON: 'rows' and 'cols' must be positive integers");
    }
    const auto rows = jr.get<std::size_t>();
    const auto cols = jc.get<std::size_t>();
    const auto& data = j.at("data");
    if (!data.is_array() || data.size() != rows * cols) {
        throw std::invalid_argument(
            "matrix JSON: 'data' must be an array of " + std::to_string(rows * cols) + " [re, im] pairs");
    }
    std::vector<Complex> entries;
    entries.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& e = data[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw std::invalid_argument("matrix JSON: entry " + std::to_string(i) + " is not a [re, im] pair");
        }
        entries.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

ComplexMatrix parse_matrix(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("matrix JSON: parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return matrix_from_json(j);
}

ComplexMatrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open matrix file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix(buf.str());
}

void save_matrix(const std::string& path, const ComplexMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write matrix file '" + path + "'");
    }
    out << matrix_to_json(m).dump(2) << "\n";
}

std::string matrix_hash(const ComplexMatrix& m) {
    const std::string canonical = matrix_to_json(m).dump();
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(canonical.data(), canonical.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("matrix_hash: SHA-256 failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

}  // namespace qmac
