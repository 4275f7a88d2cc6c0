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

#include "qmac/conditions.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmac {

RowQuantities row_quantities(const TaggingUnitary& u) {
    RowQuantities q;
    q.row0_norm_sq = std::norm(u(0, 0)) + std::norm(u(0, 1));
    q.row1_norm_sq = std::norm(u(1, 0)) + std::norm(u(1, 1));
    q.overlap = std::abs(u(1, 0) * std::conj(u(0, 0)) + u(1, 1) * std::conj(u(0, 1)));
    q.x = q.row0_norm_sq - q.row1_norm_sq;
    q.y = 2 * q.overlap;
    q.z = q.row1_norm_sq;
    return q;
}

double overlapping_rows_bound(double x, double y, double z) {
    if (!(y > 0)) {
        throw std::invalid_argument("overlapping_rows_bound needs y > 0 (orthogonal rows use the first case)");
    }
    const double t = x / y;
    const double s = std::sqrt(1 + t * t);
    return 0.5 * x * (1 + t / s) + 0.5 * y * s + z;
}

namespace {

// v normalized with the phase of its first entry above tol removed.
ComplexMatrix phase_normal_form(const ComplexMatrix& v, double tol) {
    ComplexMatrix w = v * Complex(1 / norm(v));
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (std::abs(w[i]) > tol) {
            w *= std::conj(w[i]) / std::abs(w[i]);
            break;
        }
    }
    return w;
}

}  // namespace

bool phase_equivalent(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
    const bool a_zero = norm(a) <= tol;
    const bool b_zero = norm(b) <= tol;
    if (a_zero || b_zero) {
        return a_zero && b_zero;
    }
    return max_abs_diff(phase_normal_form(a, tol), phase_normal_form(b, tol)) <= tol;
}

nlohmann::json to_json(const ConditionCheck& c) {
    return {{"applies", c.applies}, {"satisfied", c.satisfied}, {"margin", c.margin}, {"details", c.details}};
}

ConditionCheck check_case1(const TaggingUnitary& u, const Tolerances& tol) {
    const RowQuantities q = row_quantities(u);
    ConditionCheck c;
    c.applies = q.overlap <= tol.vanishing;
    c.margin = 1 - std::max(q.row0_norm_sq, q.row1_norm_sq);
    c.satisfied = c.margin > tol.strict_margin;
    c.details = {{"row0_norm_sq", q.row0_norm_sq}, {"row1_norm_sq", q.row1_norm_sq}, {"row_overlap", q.overlap}};
    return c;
}

ConditionCheck check_case2(const TaggingUnitary& u, const Tolerances& tol) {
    const RowQuantities q = row_quantities(u);
    ConditionCheck c;
    c.applies = q.overlap > tol.vanishing;
    c.details = {{"x", q.x}, {"y", q.y}, {"z", q.z}};
    if (!c.applies) {
        c.details["lhs"] = nullptr;
        return c;
    }
    const double lhs = overlapping_rows_bound(q.x, q.y, q.z);
    c.margin = 1 - lhs;
    c.satisfied = c.margin > tol.strict_margin;
    c.details["lhs"] = lhs;
    return c;
}

ConditionCheck check_condition3(const TaggingUnitary& u, const Tolerances& tol) {
    const SwapRelation rel = swap_relation(u, tol);
    const ComplexMatrix a = u.block_column(2, 0);
    const ComplexMatrix b = u.block_column(2, 1);
    const double m2_overlap = std::abs(inner(a, b));
    const bool m2_parallel = phase_equivalent(a, b, tol.phase_equivalence);
    const bool literal = !rel.holds || (m2_overlap > tol.vanishing && !m2_parallel);

    ConditionCheck c;
    c.satisfied = !rel.holds;
    c.margin = rel.residual - tol.phase_equivalence;
    c.details = {
        {"swap_relation_holds", rel.holds},
        {"swap_residual", rel.residual},
        {"gamma", rel.gamma},
        {"delta", rel.delta},
        {"m2_column_overlap", m2_overlap},
        {"m2_columns_phase_equivalent", m2_parallel},
        {"literal_clause_satisfied", literal},
    };
    return c;
}

ConditionCheck check_condition4(const TaggingUnitary& u, const Tolerances& tol) {
    const double n0 = norm(u.block_column(0, 0));
    const double n1 = norm(u.block_column(0, 1));
    ConditionCheck c;
    c.margin = std::max(n0, n1) - tol.vanishing;
    c.satisfied = c.margin > 0;
    c.details = {{"m0_column0_norm", n0}, {"m0_column1_norm", n1}};
    if (check_condition3(u, tol).satisfied && !c.satisfied) {
        throw std::logic_error("condition 3 holds but condition 4 fails; the redundancy argument is broken");
    }
    return c;
}

nlohmann::json to_json(const ConditionReport& r) {
    nlohmann::json j = {
        {"case1", to_json(r.case1)},
        {"case2", to_json(r.case2)},
        {"condition3", to_json(r.condition3)},
        {"condition4", to_json(r.condition4)},
        {"overall_secure", r.overall_secure},
        {"redundancy_note", r.redundancy_note},
    };
    nlohmann::json advisory = nlohmann::json::object();
    if (r.no_message_optimal) {
        advisory["no_message_optimal"] = to_json(*r.no_message_optimal);
    }
    if (r.best_message_attack) {
        advisory["best_message_attack"] = to_json(*r.best_message_attack);
    }
    j["advisory"] = advisory;
    return j;
}

ConditionReport validate(const ComplexMatrix& u, const AdvisoryOptions& advisory, const Tolerances& tol) {
    return validate(TaggingUnitary(u, tol), advisory, tol);
}

ConditionReport validate(const TaggingUnitary& u, const AdvisoryOptions& advisory, const Tolerances& tol) {
    ConditionReport r;
    r.case1 = check_case1(u, tol);
    r.case2 = check_case2(u, tol);
    r.condition3 = check_condition3(u, tol);
    r.condition4 = check_condition4(u, tol);
    const bool no_message_ok = r.case1.applies ? r.case1.satisfied : r.case2.satisfied;
    r.overall_secure = no_message_ok && r.condition3.satisfied;
    r.redundancy_note = "condition 4 is implied by condition 3 and does not enter overall_secure";
    if (advisory.enabled) {
        r.no_message_optimal = no_message_optimal(u, tol);
        r.best_message_attack = best_message_attack(u, advisory.priors, advisory.budget, tol);
    }
    return r;
}

}  // namespace qmac
