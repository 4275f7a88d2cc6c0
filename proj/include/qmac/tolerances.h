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

#ifndef QMAC_TOLERANCES_H
#define QMAC_TOLERANCES_H

#include <string>
#include <string_view>

#include "json.hpp"

namespace qmac {

/// Every numeric threshold used by the library, in one place.
///
/// Functions that need a threshold take a `const Tolerances&` defaulting to
/// `Tolerances{}`; the CLI overrides fields by name via `--tol NAME=VALUE`.
struct Tolerances {
    double unitarity = 1e-10;        // ||U^dag U - I||_max
    double hermiticity = 1e-10;      // ||H - H^dag||_max
    double normalization = 1e-12;    // | <psi|psi> - 1 |
    double jacobi_offdiag = 1e-12;   // relative off-diagonal Frobenius norm
    int jacobi_max_sweeps = 100;
    double phase_equivalence = 1e-9; // column relations up to phase
    double strict_margin = 1e-9;     // margin for the strict inequalities
    double vanishing = 1e-9;         // "is zero" for inner products / norms
    double step_initial = 0.3;       // coordinate search
    double step_shrink = 0.5;
    double step_floor = 1e-6;

    /// Sets a field by name. Throws std::invalid_argument for unknown names.
    void set(std::string_view name, double value);

    nlohmann::json to_json() const;
};

/// Short scientific rendering for error messages, e.g. "2.775e-02".
std::string format_deviation(double value);

}  // namespace qmac

#endif
