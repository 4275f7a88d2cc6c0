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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "qmac/linalg.h"
#include "test_util.h"

using namespace qmac;
using namespace qmac::testing;

namespace {

const double kR = 1 / std::sqrt(2.0);

// Brute-force maximum over |e0| of x a^2 + y a sqrt(1 - a^2) + z.
double bracket_max(double x, double y, double z) {
    double best = -1e300;
    for (int i = 0; i <= 20000; ++i) {
        const double a = i / 20000.0;
        best = std::max(best, x * a * a + y * a * std::sqrt(1 - a * a) + z);
    }
    return best;
}

// M0 = [[1/sqrt2, 0], [e^{i t}/sqrt2, 0]]: rows overlap with x = 0, y = 1, z = 1/2.
TaggingUnitary overlapping_rows_example(double t) {
    return dilation(ComplexMatrix{{kR, 0}, {std::polar(kR, t), 0}});
}

std::vector<TaggingUnitary> corpus() {
    std::vector<TaggingUnitary> out{TaggingUnitary::identity(), TaggingUnitary::x_block(),
                                    TaggingUnitary::worked_example(), swap_without_column_condition(),
                                    overlapping_rows_example(0.4)};
    Rng rng = make_rng(100);
    for (int n = 0; n < 1000; ++n) {
        out.emplace_back(haar_random_unitary(4, rng));
    }
    // Small contractions: mostly secure candidates.
    for (int n = 0; n < 300; ++n) {
        ComplexMatrix a = haar_random_unitary(2, rng);
        a *= 0.9 * uniform01(rng);
        a(1, 0) *= uniform01(rng);
        out.push_back(dilation(a));
    }
    return out;
}

const AdvisoryOptions kNoAdvisory{false, {}, {}};

}  // namespace

TEST(overlapping_rows_bound, spot_values) {
    EXPECT_NEAR(overlapping_rows_bound(0, 1, 0), 0.5, 1e-12);
    const double expect = 0.25 * (1 + kR) + 0.25 * std::sqrt(2.0) + 0.25;
    EXPECT_NEAR(overlapping_rows_bound(0.5, 0.5, 0.25), expect, 1e-12);
    EXPECT_NEAR(overlapping_rows_bound(0.5, 0.5, 0.25), 1.0303301, 1e-7);
}

TEST(overlapping_rows_bound, rejects_non_positive_y) {
    EXPECT_THROW(overlapping_rows_bound(0.5, 0, 0.1), std::invalid_argument);
    EXPECT_THROW(overlapping_rows_bound(0.5, -1, 0.1), std::invalid_argument);
}

TEST(overlapping_rows_bound, exceeds_one_when_z_does) {
    Rng rng = make_rng(1);
    for (int n = 0; n < 1000; ++n) {
        const double x = uniform01(rng);
        const double y = 1e-6 + uniform01(rng);
        const double z = 1 + uniform01(rng);
        EXPECT_GT(overlapping_rows_bound(x, y, z), 1);
    }
}

TEST(overlapping_rows_bound, dominates_exact_maximum) {
    Rng rng = make_rng(2);
    for (int n = 0; n < 200; ++n) {
        const TaggingUnitary u(haar_random_unitary(4, rng));
        const auto q = row_quantities(u);
        ASSERT_GT(q.y, 0);
        const double bound = overlapping_rows_bound(q.x, q.y, q.z);
        EXPECT_GE(bound, bracket_max(q.x, q.y, q.z) - 1e-12);
        // The exact maximum is sigma_max(M0)^2, so bound < 1 rules out a unit singular value.
        EXPECT_NEAR(bracket_max(q.x, q.y, q.z), std::pow(sigma_max_2x2(u.block(0)), 2), 1e-7);
    }
}

TEST(phase_equivalent, cases) {
    const ComplexMatrix a{{1}, {Complex(0, 1)}};
    EXPECT_TRUE(phase_equivalent(a, Complex(std::polar(2.0, 0.7)) * a, 1e-9));
    EXPECT_FALSE(phase_equivalent(a, ComplexMatrix{{1}, {-1}}, 1e-9));
    EXPECT_TRUE(phase_equivalent(ComplexMatrix(2, 1), ComplexMatrix(2, 1), 1e-9));
    EXPECT_FALSE(phase_equivalent(ComplexMatrix(2, 1), a, 1e-9));
}

TEST(check_case1, reference_cases) {
    const auto id = check_case1(TaggingUnitary::identity());
    EXPECT_TRUE(id.applies);
    EXPECT_FALSE(id.satisfied);
    EXPECT_NEAR(id.margin, 0, 1e-15);

    const auto xb = check_case1(TaggingUnitary::x_block());
    EXPECT_TRUE(xb.applies);
    EXPECT_TRUE(xb.satisfied);
    EXPECT_NEAR(xb.margin, 1, 1e-15);

    const auto w = check_case1(TaggingUnitary::worked_example());
    EXPECT_TRUE(w.applies);
    EXPECT_TRUE(w.satisfied);
    EXPECT_NEAR(w.details.at("row0_norm_sq").get<double>(), 0.5, 1e-15);
    EXPECT_NEAR(w.details.at("row1_norm_sq").get<double>(), 0.0, 1e-15);
}

TEST(check_case2, reference_cases) {
    EXPECT_FALSE(check_case2(TaggingUnitary::worked_example()).applies);
    EXPECT_FALSE(check_case2(TaggingUnitary::identity()).applies);

    const auto c = check_case2(overlapping_rows_example(0.4));
    EXPECT_TRUE(c.applies);
    EXPECT_NEAR(c.details.at("x").get<double>(), 0, 1e-12);
    EXPECT_NEAR(c.details.at("y").get<double>(), 1, 1e-12);
    EXPECT_NEAR(c.details.at("z").get<double>(), 0.5, 1e-12);
    // 0 + 1/2 + 1/2 = 1: not strictly below one.
    EXPECT_NEAR(c.details.at("lhs").get<double>(), 1.0, 1e-12);
    EXPECT_FALSE(c.satisfied);
}

TEST(check_cases, exactly_one_applies) {
    for (const auto& u : corpus()) {
        EXPECT_NE(check_case1(u).applies, check_case2(u).applies);
    }
}

TEST(check_condition3, reference_cases) {
    EXPECT_FALSE(check_condition3(TaggingUnitary::identity()).satisfied);
    EXPECT_FALSE(check_condition3(TaggingUnitary::x_block()).satisfied);
    const auto w = check_condition3(TaggingUnitary::worked_example());
    EXPECT_TRUE(w.satisfied);
    EXPECT_TRUE(w.details.at("literal_clause_satisfied").get<bool>());
    EXPECT_GT(w.margin, 0);
}

TEST(check_condition3, swap_relation_decides_even_with_generic_lower_columns) {
    const auto c = check_condition3(swap_without_column_condition());
    EXPECT_FALSE(c.satisfied);
    EXPECT_TRUE(c.details.at("literal_clause_satisfied").get<bool>());
    EXPECT_TRUE(perfect_message_attack(swap_without_column_condition()).has_value());
}

TEST(check_condition4, reference_cases) {
    EXPECT_TRUE(check_condition4(TaggingUnitary::identity()).satisfied);
    EXPECT_FALSE(check_condition4(TaggingUnitary::x_block()).satisfied);
    const auto w = check_condition4(TaggingUnitary::worked_example());
    EXPECT_TRUE(w.satisfied);
    EXPECT_NEAR(w.details.at("m0_column0_norm").get<double>(), 0.5, 1e-15);
}

TEST(check_condition4, implied_by_condition3) {
    Rng rng = make_rng(3);
    for (int n = 0; n < 1000; ++n) {
        const TaggingUnitary u(haar_random_unitary(4, rng));
        const bool c3 = check_condition3(u).satisfied;
        bool c4 = false;
        ASSERT_NO_THROW(c4 = check_condition4(u).satisfied);
        EXPECT_TRUE(!c3 || c4);
    }
}

TEST(validate, reference_verdicts) {
    EXPECT_FALSE(validate(TaggingUnitary::identity(), kNoAdvisory).overall_secure);
    const auto xb = validate(TaggingUnitary::x_block());
    EXPECT_FALSE(xb.overall_secure);
    ASSERT_TRUE(xb.no_message_optimal.has_value());
    EXPECT_NEAR(xb.no_message_optimal->probability, 0.5, 1e-12);
    EXPECT_GE(xb.best_message_attack->probability, 1 - 1e-6);

    const auto w = validate(TaggingUnitary::worked_example());
    EXPECT_TRUE(w.overall_secure);
    EXPECT_LE(w.best_message_attack->probability, 1 - 1e-4);
}

TEST(validate, rejects_non_unitary) {
    auto m = ComplexMatrix::identity(4);
    m(0, 1) = 0.1;
    try {
        validate(m);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("1.000e-01"), std::string::npos) << e.what();
    }
    EXPECT_THROW(validate(ComplexMatrix::identity(3)), std::invalid_argument);
}

TEST(validate, corpus_invariants) {
    int secure = 0;
    for (const auto& u : corpus()) {
        const auto r = validate(u, kNoAdvisory);
        const bool no_message_ok = r.case1.applies ? r.case1.satisfied : r.case2.satisfied;
        EXPECT_EQ(r.overall_secure, no_message_ok && r.condition3.satisfied);
        EXPECT_TRUE(!r.condition3.satisfied || r.condition4.satisfied);
        if (r.overall_secure) {
            ++secure;
            EXPECT_LT(no_message_optimal(u).probability, 1 - 1e-6);
            EXPECT_FALSE(perfect_message_attack(u).has_value());
        } else if (!r.condition3.satisfied) {
            EXPECT_TRUE(perfect_message_attack(u).has_value());
        }
    }
    EXPECT_GT(secure, 100);
}

TEST(validate, distinguishable_keys_fail_condition4) {
    for (const auto& u : corpus()) {
        if (key_distinguishability(u).distinguishable) {
            EXPECT_FALSE(check_condition4(u).satisfied);
        }
    }
    EXPECT_TRUE(key_distinguishability(TaggingUnitary::x_block()).distinguishable);
}

TEST(validate, json_report) {
    const auto j = to_json(validate(TaggingUnitary::worked_example(), {true, {2000, 4, 1}, {}}));
    EXPECT_TRUE(j.at("overall_secure").get<bool>());
    for (const char* k : {"case1", "case2", "condition3", "condition4"}) {
        ASSERT_TRUE(j.contains(k)) << k;
        EXPECT_TRUE(j.at(k).contains("margin"));
        EXPECT_TRUE(j.at(k).contains("satisfied"));
        EXPECT_TRUE(j.at(k).contains("details"));
    }
    EXPECT_EQ(j.at("advisory").at("best_message_attack").at("seed"), 4);
    EXPECT_EQ(j.at("advisory").at("no_message_optimal").at("method"), "eigen_optimal");
    EXPECT_FALSE(j.at("redundancy_note").get<std::string>().empty());
}
