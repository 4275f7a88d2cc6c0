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

// Acceptance criteria, one PASS/FAIL line each.
//
// Usage: acceptance_test <path to qmac CLI> <data directory>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qmac/adversary.h"
#include "qmac/conditions.h"
#include "qmac/linalg.h"
#include "qmac/protocol.h"

using namespace qmac;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " (" << detail << ")"
              << std::endl;
    failures += !pass;
}

void info(int id, const std::string& what) {
    std::cout << "INFO criterion " << id << ": " << what << std::endl;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

double sigma3(double p, std::uint64_t n) {
    return 3 * std::sqrt(std::clamp(p, 0.0, 1.0) * (1 - std::clamp(p, 0.0, 1.0)) / static_cast<double>(n));
}

// Largest singular value of a 2x2 block.
double sigma_max_2x2(const ComplexMatrix& a) {
    const double t = std::norm(a(0, 0)) + std::norm(a(0, 1)) + std::norm(a(1, 0)) + std::norm(a(1, 1));
    const double det = std::norm(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
    return std::sqrt(0.5 * (t + std::sqrt(std::max(0.0, t * t - 4 * det))));
}

ComplexMatrix sigma_x_plus_identity() {
    ComplexMatrix v = ComplexMatrix::identity(4);
    v(0, 0) = 0.0;
    v(1, 1) = 0.0;
    v(0, 1) = 1.0;
    v(1, 0) = 1.0;
    return v;
}

void criterion1() {
    Rng rng = make_rng(1001);
    std::uint64_t wrong = 0;
    double worst_fidelity_gap = 0;
    for (int n = 0; n < 100; ++n) {
        const TaggingUnitary u(haar_random_unitary(4, rng));
        for (int bit = 0; bit < 2; ++bit) {
            for (int t = 0; t < 1000; ++t) {
                const RunRecord r = run_honest(u, bit, rng);
                wrong += !(r.accepted && r.decoded == bit);
                worst_fidelity_gap = std::max(worst_fidelity_gap, std::abs(1 - r.key_fidelity));
            }
        }
    }
    report(1, wrong == 0 && worst_fidelity_gap <= 1e-10, "honest runs decode deterministically",
           "wrong decodes " + std::to_string(wrong) + " of 200000, worst |1 - key fidelity| " +
               fmt(worst_fidelity_gap));
}

void criterion2() {
    Rng rng = make_rng(1002);
    double worst_trace = 0;
    double worst_classical = 0;
    const std::vector<std::size_t> dims{2, 2, 4};
    const std::vector<std::size_t> keep{2};
    for (int n = 0; n < 100; ++n) {
        const TaggingUnitary u(haar_random_unitary(4, rng));
        for (int bit = 0; bit < 2; ++bit) {
            const ComplexMatrix rho = channel_density(u, bit);
            const ComplexMatrix traced = partial_trace(encode(u, bit).density(), dims, keep);
            worst_trace = std::max(worst_trace, max_abs_diff(rho, traced));
            worst_classical = std::max(worst_classical, max_abs_diff(rho, classical_key_channel_density(u, bit)));
        }
    }
    report(2, worst_trace <= 1e-10 && worst_classical <= 1e-10, "channel state equals the reduced joint state",
           "max deviation from partial trace " + fmt(worst_trace) + ", from classical-key mode " +
               fmt(worst_classical));
}

void criterion3() {
    const double xb = no_message_optimal(TaggingUnitary::x_block()).probability;
    const double id = no_message_optimal(TaggingUnitary::identity()).probability;
    const bool fixed_ok = std::abs(xb - 0.5) <= 1e-12 && std::abs(id - 1.0) <= 1e-12;

    Rng rng = make_rng(1003);
    double worst_dominance = 0;  // max(oracle - eigen), must be <= 1e-9
    double worst_match = 0;      // max(eigen - better oracle), must be <= 1e-3
    double worst_closed_form = 0;
    for (int n = 0; n < 50; ++n) {
        const TaggingUnitary u(haar_random_unitary(4, rng));
        const double eigen = no_message_optimal(u).probability;
        double random_best = 0;
        for (int k = 0; k < 100000; ++k) {
            random_best = std::max(random_best, no_message_pf(u, EveNoMessageState(haar_random_state(4, rng))));
        }
        const double grid_best = no_message_restricted_grid(u, 101, 64).probability;
        const double oracle = std::max(random_best, grid_best);
        worst_dominance = std::max(worst_dominance, oracle - eigen);
        worst_match = std::max(worst_match, eigen - oracle);
        worst_closed_form = std::max(worst_closed_form, std::abs(eigen - (1 + sigma_max_2x2(u.block(0))) / 2));
    }
    const bool dominance_ok = worst_dominance <= 1e-9;
    const bool match_ok = worst_match <= 1e-3;
    report(3, fixed_ok && dominance_ok && match_ok, "no-message optimum",
           "X_block " + fmt(xb) + ", identity " + fmt(id) + "; dominance " + (dominance_ok ? "ok" : "violated") +
               " (max oracle excess " + fmt(worst_dominance) + "); oracle match within 1e-3 " +
               (match_ok ? "ok" : "not reached") + " (max gap to better oracle " + fmt(worst_match) + ")");
    info(3, "eigen value vs closed form (1 + sigma_max(M0)) / 2 over the same 50 unitaries: max deviation " +
                fmt(worst_closed_form));
}

void criterion4() {
    Rng rng = make_rng(1004);
    double worst = 0;
    for (int n = 0; n < 50; ++n) {
        const TaggingUnitary u(haar_random_unitary(4, rng));
        for (int i = 0; i <= 100; ++i) {
            for (int j = 0; j < 64; ++j) {
                const double a = i / 100.0;
                const double t = 2 * std::numbers::pi * j / 64;
                const double explicit_pf = no_message_pf(u, EveNoMessageState::restricted(u, a, t));
                worst = std::max(worst, std::abs(no_message_pf_restricted(u, a, t) - explicit_pf));
            }
        }
    }
    report(4, worst <= 1e-12, "restricted form agrees with explicit states", "max deviation " + fmt(worst));
}

void criterion5() {
    const double id_pf = message_attack_pf(TaggingUnitary::identity(), sigma_x_plus_identity());
    const auto xb = perfect_message_attack(TaggingUnitary::x_block());
    const double xb_pf = xb ? message_attack_pf(TaggingUnitary::x_block(), *xb) : 0.0;
    const auto w = TaggingUnitary::worked_example();
    const bool w_none = !perfect_message_attack(w).has_value();
    const double w_best = best_message_attack(w, {}, {10000, 0, 0}).probability;
    const bool pass = std::abs(id_pf - 1) <= 1e-12 && xb && std::abs(xb_pf - 1) <= 1e-9 && w_none &&
                      w_best <= 1 - 1e-4;
    report(5, pass, "message-attack certainties",
           "identity " + fmt(id_pf) + ", X_block perfect attack " + (xb ? fmt(xb_pf) : std::string("missing")) +
               ", worked example perfect attack " + (w_none ? "none" : "found") + ", best search " + fmt(w_best));
}

void criterion6() {
    const AdvisoryOptions none{false, {}, {}};
    const bool id = validate(TaggingUnitary::identity(), none).overall_secure;
    const bool xb = validate(TaggingUnitary::x_block(), none).overall_secure;
    const bool w = validate(TaggingUnitary::worked_example(), none).overall_secure;
    Rng rng = make_rng(1006);
    int counterexamples = 0;
    int errors = 0;
    for (int n = 0; n < 1000; ++n) {
        const TaggingUnitary u(haar_random_unitary(4, rng));
        try {
            counterexamples += check_condition3(u).satisfied && !check_condition4(u).satisfied;
        } catch (const std::logic_error&) {
            ++errors;
        }
    }
    report(6, !id && !xb && w && counterexamples == 0 && errors == 0, "conditions checklist",
           std::string("identity ") + (id ? "secure" : "insecure") + ", X_block " + (xb ? "secure" : "insecure") +
               ", worked example " + (w ? "secure" : "insecure") + ", redundancy counterexamples " +
               std::to_string(counterexamples + errors) + " of 1000");
}

void criterion7() {
    const double a = overlapping_rows_bound(0, 1, 0);
    // Re-derivation: x/2 (1 + x/r) + r/2 + z with r = sqrt(x^2 + y^2).
    const double x = 0.5;
    const double y = 0.5;
    const double z = 0.25;
    const double r = std::hypot(x, y);
    const double expect = x / 2 * (1 + x / r) + r / 2 + z;
    const double b = overlapping_rows_bound(x, y, z);
    report(7, std::abs(a - 0.5) <= 1e-12 && std::abs(b - expect) <= 1e-9, "overlapping-rows bound spot values",
           "(0, 1, 0) -> " + fmt(a) + ", (0.5, 0.5, 0.25) -> " + fmt(b) + " vs " + fmt(expect));
}

void criterion8() {
    Rng rng = make_rng(1008);
    int rule_mismatch = 0;
    for (int n = 0; n < 1000; ++n) {
        const TaggingUnitary u(haar_random_unitary(4, rng));
        const bool expected = std::abs(u(0, 0)) > 1e-9 || std::abs(u(1, 1)) > 1e-9;
        rule_mismatch += key_reuse_feasibility(u).ruled_out != expected;
    }
    rule_mismatch += !key_reuse_feasibility(TaggingUnitary::worked_example()).ruled_out;
    rule_mismatch += !key_reuse_feasibility(TaggingUnitary::identity()).ruled_out;

    const TaggingUnitary u = TaggingUnitary::worked_example();
    int certain = 0;
    double max_frequency = 0;
    for (int n = 0; n < 1000; ++n) {
        KeyReuseConfig cfg;
        cfg.trials = 10000;
        cfg.interaction = haar_random_unitary(8, rng);
        const KeyReuseStats s = simulate_key_reuse(u, cfg, rng);
        const double f = s.surviving == 0 ? 0.0 : s.forgery_frequency;
        certain += f >= 1.0;
        max_frequency = std::max(max_frequency, f);
    }
    report(8, rule_mismatch == 0 && certain == 0, "key reuse cannot give certain forgery",
           "feasibility rule mismatches " + std::to_string(rule_mismatch) + "; 1000 Haar interactions x 10000 "
               "trials: max forgery frequency " + fmt(max_frequency) + ", certain " + std::to_string(certain));
}

void criterion9() {
    const std::uint64_t n = 100000;
    int checked = 0;
    int outside = 0;
    double worst_ratio = 0;
    auto check = [&](double p, double f) {
        ++checked;
        const double bound = sigma3(p, n);
        if (std::abs(f - p) > bound + 1e-12) {
            ++outside;
        }
        if (bound > 0) {
            worst_ratio = std::max(worst_ratio, std::abs(f - p) / bound);
        }
    };

    Rng rng = make_rng(1009);
    std::vector<TaggingUnitary> us{TaggingUnitary::worked_example(), TaggingUnitary::x_block()};
    for (int k = 0; k < 3; ++k) {
        us.emplace_back(haar_random_unitary(4, rng));
    }
    for (const auto& u : us) {
        // Honest acceptance.
        std::uint64_t accepted = 0;
        for (std::uint64_t t = 0; t < n; ++t) {
            accepted += run_honest(u, static_cast<int>(t & 1), rng).accepted;
        }
        check(1.0, static_cast<double>(accepted) / n);
        // No-message forgery with the optimal state and with a random state.
        const AttackResult nm = no_message_optimal(u);
        check(nm.probability, simulate_no_message(u, nm.strategy, n, rng).value());
        const ComplexMatrix eve = haar_random_state(4, rng);
        check(no_message_pf(u, EveNoMessageState(eve)), simulate_no_message(u, eve, n, rng).value());
        // Message substitution with the best found unitary and with a fixed one.
        const Priors pr{0.4, 0.6};
        const AttackResult msg = best_message_attack(u, pr, {5000, 0, 0});
        check(message_attack_pf(u, msg.strategy, pr), simulate_message_attack(u, msg.strategy, pr, n, rng).value());
        const ComplexMatrix v = sigma_x_plus_identity();
        check(message_attack_pf(u, v, pr), simulate_message_attack(u, v, pr, n, rng).value());
    }
    report(9, outside == 0, "Monte Carlo agrees with analytic probabilities",
           std::to_string(checked) + " checks at N = 100000, " + std::to_string(outside) +
               " outside 3 sigma, worst |delta| / 3 sigma " + fmt(worst_ratio));
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

void criterion10(const std::string& cli, const std::string& data_dir) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qmac_acceptance_reproducibility";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string input = " --input " + data_dir + "/worked_example.json";
    const std::vector<std::string> commands{
        "validate --seed 5" + input,
        "simulate --seed 5 --trials 5000 --records" + input,
        "attack --seed 5" + input,
        "optimize --seed 5 --restarts 2 --budget 100 --attack-budget 1000",
        "demo --seed 5",
    };
    int differing = 0;
    int empty = 0;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::string texts[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / ("report_" + std::to_string(i) + "_" + std::to_string(rep) + ".json");
            run(cli + " " + commands[i] + " --out " + out.string() + " > /dev/null 2>&1");
            texts[rep] = read_file(out);
        }
        empty += texts[0].empty();
        differing += texts[0] != texts[1];
    }
    fs::remove_all(dir);
    report(10, differing == 0 && empty == 0, "identical CLI invocations give byte-identical reports",
           std::to_string(commands.size()) + " commands run twice, " + std::to_string(differing) + " differing, " +
               std::to_string(empty) + " missing");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance_test <qmac cli> <data dir>\n";
        return 2;
    }
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10(argv[1], argv[2]);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
