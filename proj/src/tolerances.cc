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

#include "qmac/tolerances.h"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace qmac {

void Tolerances::set(std::string_view name, double value) {
    if (!std::isfinite(value) || value < 0) {
        throw std::invalid_argument("tolerance '" + std::string(name) + "' must be finite and non-negative");
    }
    if (name == "unitarity") {
        unitarity = value;
    } else if (name == "hermiticity") {
        hermiticity = value;
    } else if (name == "normalization") {
        normalization = value;
    } else if (name == "jacobi_offdiag") {
        jacobi_offdiag = value;
    } else if (name == "jacobi_max_sweeps") {
        jacobi_max_sweeps = static_cast<int>(value);
    } else if (name == "phase_equivalence") {
        phase_equivalence = value;
    } else if (name == "strict_margin") {
        strict_margin = value;
    } else if (name == "vanishing") {
        vanishing = value;
    } else if (name == "step_initial") {
        step_initial = value;
    } else if (name == "step_shrink") {
        if (value <= 0 || value >= 1) {
            throw std::invalid_argument("step_shrink must lie in (0, 1)");
        }
        step_shrink = value;
    } else if (name == "step_floor") {
        step_floor = value;
    } else {
        throw std::invalid_argument("unknown tolerance '" + std::string(name) + "'");
    }
}

nlohmann::json Tolerances::to_json() const {
    return {
        {"unitarity", unitarity},
        {"hermiticity", hermiticity},
        {"normalization", normalization},
        {"jacobi_offdiag", jacobi_offdiag},
        {"jacobi_max_sweeps", jacobi_max_sweeps},
        {"phase_equivalence", phase_equivalence},
        {"strict_margin", strict_margin},
        {"vanishing", vanishing},
        {"step_initial", step_initial},
        {"step_shrink", step_shrink},
        {"step_floor", step_floor},
    };
}

std::string format_deviation(double value) {
    std::ostringstream out;
    out << std::scientific << std::setprecision(3) << value;
    return out.str();
}

}  // namespace qmac
