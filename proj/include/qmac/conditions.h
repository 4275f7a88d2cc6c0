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

#ifndef QMAC_CONDITIONS_H
#define QMAC_CONDITIONS_H

#include <optional>
#include <string>

#include "json.hpp"
#include "qmac/adversary.h"
#include "qmac/matrix.h"
#include "qmac/protocol.h"
#include "qmac/tolerances.h"

namespace qmac {

/// Row quantities of the M0 block: x = |r0|^2 - |r1|^2, y = 2 |r1 r0^dag|, z = |r1|^2.
struct RowQuantities {
    double x = 0;
    double y = 0;
    double z = 0;
    double row0_norm_sq = 0;
    double row1_norm_sq = 0;
    double overlap = 0;  // |r1 r0^dag|
};

RowQuantities row_quantities(const TaggingUnitary& u);

/// Upper bound on the no-message bracket when the M0 rows overlap:
/// x/2 (1 + (x/y) (1 + (x/y)^2)^{-1/2}) + y/2 (1 + (x/y)^2)^{1/2} + z.
/// Throws std::invalid_argument unless y > 0.
double overlapping_rows_bound(double x, double y, double z);

/// Whether a vector pair agrees up to a global phase. Both vectors are
/// normalized and the phase of the first entry above `tol` is stripped; a
/// vanishing vector is equivalent only to another vanishing vector.
bool phase_equivalent(const ComplexMatrix& a, const ComplexMatrix& b, double tol);

/// One security condition. `margin` is signed: positive on the satisfied side.
struct ConditionCheck {
    bool applies = true;
    bool satisfied = false;
    double margin = 0;
    nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const ConditionCheck& c);

/// Orthogonal M0 rows: applies iff |r1 r0^dag| <= tol.vanishing; satisfied
/// iff both squared row norms are below 1 by more than tol.strict_margin.
ConditionCheck check_case1(const TaggingUnitary& u, const Tolerances& tol = {});

/// Overlapping M0 rows: applies exactly when case 1 does not; satisfied iff
/// overlapping_rows_bound(x, y, z) < 1 by more than tol.strict_margin.
ConditionCheck check_case2(const TaggingUnitary& u, const Tolerances& tol = {});

/// No certain message substitution: satisfied iff M0^0 is not e^{i gamma}
/// S(delta) sigma_x M0^1 for any phases. The two-clause textbook form (which
/// also accepts orthogonal-or-parallel failures of the M2 columns) is
/// reported in details as "literal_clause_satisfied"; it is not used for the
/// verdict because the substitution attack succeeds whenever the M0 relation
/// holds, whatever the M2 columns are.
ConditionCheck check_condition3(const TaggingUnitary& u, const Tolerances& tol = {});

/// Tagged branches not perfectly distinguishable: satisfied iff some M0
/// column has norm above tol.vanishing. Throws std::logic_error if condition 3
/// holds while this one fails.
ConditionCheck check_condition4(const TaggingUnitary& u, const Tolerances& tol = {});

/// Attack snapshot options for the advisory part of a report.
struct AdvisoryOptions {
    bool enabled = true;
    SearchBudget budget{};
    Priors priors{};
};

struct ConditionReport {
    ConditionCheck case1;
    ConditionCheck case2;
    ConditionCheck condition3;
    ConditionCheck condition4;
    bool overall_secure = false;
    std::string redundancy_note;
    std::optional<AttackResult> no_message_optimal;
    std::optional<AttackResult> best_message_attack;
};

nlohmann::json to_json(const ConditionReport& r);

/// Runs every check. overall_secure = (the applicable case) and condition 3.
/// Throws std::invalid_argument if `u` is not 4x4 unitary within tol.unitarity.
ConditionReport validate(const ComplexMatrix& u, const AdvisoryOptions& advisory = {}, const Tolerances& tol = {});
ConditionReport validate(const TaggingUnitary& u, const AdvisoryOptions& advisory = {}, const Tolerances& tol = {});

}  // namespace qmac

#endif
