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

// qmac: validate, simulate, attack and design tagging unitaries.
//
// Exit codes: 0 success (secure for validate/attack/demo), 3 insecure,
// 2 invalid input or usage, 1 internal error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmac/adversary.h"
#include "qmac/conditions.h"
#include "qmac/designer.h"
#include "qmac/matrix_json.h"
#include "qmac/protocol.h"
#include "qmac/tolerances.h"

namespace {

using nlohmann::json;
using namespace qmac;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInsecure = 3;

// Random stream ids, so analyses sharing a seed do not share draws.
constexpr std::uint64_t kStreamSimulate = 0;
constexpr std::uint64_t kStreamNoMessage = 1;
constexpr std::uint64_t kStreamMessage = 2;
constexpr std::uint64_t kStreamReuse = 3;

struct Config {
    std::string input;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;  // attack / demo Monte Carlo; 0 means the default
    std::uint64_t simulate_trials = 1000;
    std::uint64_t budget = 0;
    std::string priors = "0.5,0.5";
    std::string out;
    std::vector<std::string> tol_overrides;
    unsigned workers = 0;
    bool records = false;
    // optimize
    int restarts = 1;
    std::uint64_t attack_budget = 2500;
    std::string warm_start;
    std::string trace;
    std::string score_rule = "worst_case";
    double no_message_weight = 0.5;
};

Tolerances parse_tolerances(const std::vector<std::string>& overrides) {
    Tolerances tol;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--tol expects NAME=VALUE, got '" + o + "'");
        }
        double value = 0;
        try {
            std::size_t used = 0;
            value = std::stod(o.substr(eq + 1), &used);
            if (used != o.size() - eq - 1) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("--tol value for '" + o.substr(0, eq) + "' is not a number");
        }
        tol.set(o.substr(0, eq), value);
    }
    return tol;
}

Priors parse_priors(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw std::invalid_argument("--priors expects p0,p1");
    }
    Priors p;
    try {
        p.p0 = std::stod(text.substr(0, comma));
        p.p1 = std::stod(text.substr(comma + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("--priors values must be numbers");
    }
    p.validate();
    return p;
}

json priors_json(const Priors& p) {
    return json::array({p.p0, p.p1});
}

struct Input {
    ComplexMatrix matrix;
    std::string source;
};

Input read_input(const Config& cfg) {
    if (cfg.input.empty()) {
        throw std::invalid_argument("--input is required");
    }
    return {load_matrix(cfg.input), cfg.input};
}

json envelope(const std::string& command, const Config& cfg, const Tolerances& tol, const Input* input) {
    json j = {
        {"tool", {{"name", "qmac"}, {"version", QMAC_VERSION}}},
        {"command", command},
        {"seed", cfg.seed},
        {"tolerances", tol.to_json()},
    };
    if (input != nullptr) {
        j["input"] = {{"source", input->source}, {"sha256", matrix_hash(input->matrix)}};
    }
    return j;
}

void emit(const json& report, const std::string& out) {
    const std::string text = report.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + out + "' for writing");
    }
    f << text;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    f << text;
}

// Analytic probability next to a seeded Monte Carlo frequency.
json monte_carlo_check(double analytic, const Frequency& f) {
    const double p = std::clamp(analytic, 0.0, 1.0);
    const double bound = f.trials == 0 ? 0.0 : 3 * std::sqrt(p * (1 - p) / static_cast<double>(f.trials));
    const double delta = f.value() - analytic;
    return {
        {"analytic", analytic},
        {"frequency", f.value()},
        {"trials", f.trials},
        {"delta", delta},
        {"three_sigma", bound},
        {"within_three_sigma", std::abs(delta) <= bound + 1e-12},
    };
}

// ---------------------------------------------------------------------------

int cmd_validate(const Config& cfg, const Tolerances& tol) {
    const Input in = read_input(cfg);
    const AdvisoryOptions advisory{true, {cfg.budget == 0 ? 10000 : cfg.budget, cfg.seed, cfg.workers},
                                   parse_priors(cfg.priors)};
    const ConditionReport r = validate(in.matrix, advisory, tol);
    json report = envelope("validate", cfg, tol, &in);
    report["priors"] = priors_json(advisory.priors);
    report["result"] = to_json(r);
    emit(report, cfg.out);
    return r.overall_secure ? kExitOk : kExitInsecure;
}

json simulate_summary(std::uint64_t trials, std::uint64_t accepted, std::uint64_t correct, double fidelity) {
    json s = {{"trials", trials}, {"accepted", accepted}, {"decoded_correctly", correct}};
    if (trials == 0) {
        s["acceptance_rate"] = nullptr;
        s["decode_accuracy"] = nullptr;
        s["mean_key_fidelity"] = nullptr;
    } else {
        const double n = static_cast<double>(trials);
        s["acceptance_rate"] = accepted / n;
        s["decode_accuracy"] = correct / n;
        s["mean_key_fidelity"] = fidelity / n;
    }
    return s;
}

int cmd_simulate(const Config& cfg, const Tolerances& tol) {
    const Input in = read_input(cfg);
    const TaggingUnitary u(in.matrix, tol);
    Rng rng = make_rng(cfg.seed, kStreamSimulate);
    json per_bit = json::array();
    json records = json::array();
    std::uint64_t all_acc = 0;
    std::uint64_t all_ok = 0;
    double all_fid = 0;
    for (int bit = 0; bit < 2; ++bit) {
        std::uint64_t acc = 0;
        std::uint64_t ok = 0;
        double fid = 0;
        for (std::uint64_t t = 0; t < cfg.simulate_trials; ++t) {
            const RunRecord r = run_honest(u, bit, rng);
            acc += r.accepted;
            ok += r.decoded == bit;
            fid += r.key_fidelity;
            if (cfg.records) {
                records.push_back(to_json(r));
            }
        }
        json s = simulate_summary(cfg.simulate_trials, acc, ok, fid);
        s["message"] = bit;
        per_bit.push_back(s);
        all_acc += acc;
        all_ok += ok;
        all_fid += fid;
    }
    json report = envelope("simulate", cfg, tol, &in);
    json summary = simulate_summary(2 * cfg.simulate_trials, all_acc, all_ok, all_fid);
    summary["empty"] = cfg.simulate_trials == 0;
    summary["per_message"] = per_bit;
    report["result"] = {{"trials_per_message", cfg.simulate_trials}, {"summary", summary}};
    if (cfg.records) {
        report["result"]["records"] = records;
    }
    emit(report, cfg.out);
    return kExitOk;
}

json attack_report(const TaggingUnitary& u, const Config& cfg, const Tolerances& tol, bool& certain_attack) {
    const Priors priors = parse_priors(cfg.priors);
    const std::uint64_t mc_trials = cfg.trials == 0 ? 100000 : cfg.trials;
    const SearchBudget budget{cfg.budget == 0 ? 10000 : cfg.budget, cfg.seed, cfg.workers};

    const AttackResult nm = no_message_optimal(u, tol);
    const AttackResult grid = no_message_restricted_grid(u);
    Rng rng_nm = make_rng(cfg.seed, kStreamNoMessage);
    const Frequency nm_freq = simulate_no_message(u, nm.strategy, mc_trials, rng_nm);

    const auto perfect = perfect_message_attack(u, tol);
    AttackResult msg = best_message_attack(u, priors, budget, tol);
    if (perfect) {
        const double p = message_attack_pf(u, *perfect, priors, tol);
        if (p >= msg.probability) {
            msg.probability = p;
            msg.strategy = *perfect;
            msg.method = AttackMethod::closed_form;
        }
    }
    Rng rng_msg = make_rng(cfg.seed, kStreamMessage);
    const Frequency msg_freq = simulate_message_attack(u, msg.strategy, priors, mc_trials, rng_msg);

    const KeyDistinguishability kd = key_distinguishability(u, tol);
    json gram = json::array();
    for (const auto& g : kd.gram) {
        gram.push_back({g.real(), g.imag()});
    }

    const KeyReuseFeasibility kr = key_reuse_feasibility(u, tol);
    KeyReuseConfig reuse;
    reuse.trials = mc_trials;
    reuse.interaction = subspace_marking_interaction(reuse.spec);
    Rng rng_reuse = make_rng(cfg.seed, kStreamReuse);
    const KeyReuseStats reuse_stats = simulate_key_reuse(u, reuse, rng_reuse, tol);

    certain_attack = nm.probability >= 1 - 1e-6 || msg.probability >= 1 - 1e-6 || kd.distinguishable ||
                     reuse_stats.forgery_probability >= 1 - 1e-6;
    return {
        {"priors", priors_json(priors)},
        {"no_message",
         {{"optimal", to_json(nm)},
          {"restricted_grid", to_json(grid)},
          {"monte_carlo", monte_carlo_check(nm.probability, nm_freq)}}},
        {"message_substitution",
         {{"best", to_json(msg)},
          {"perfect_attack_exists", perfect.has_value()},
          {"monte_carlo", monte_carlo_check(msg.probability, msg_freq)}}},
        {"key_distinguishing", {{"distinguishable", kd.distinguishable}, {"gram", gram}}},
        {"key_reuse",
         {{"ruled_out", kr.ruled_out},
          {"witness", kr.witness ? json(*kr.witness) : json(nullptr)},
          {"diagonal", kr.diagonal},
          {"interaction", "subspace_marking"},
          {"simulation", to_json(reuse_stats)},
          {"monte_carlo",
           monte_carlo_check(reuse_stats.forgery_probability,
                             Frequency{static_cast<std::uint64_t>(std::llround(reuse_stats.forgery_frequency *
                                                                               reuse_stats.surviving)),
                                       reuse_stats.surviving})}}},
        {"certain_attack_found", certain_attack},
    };
}

int cmd_attack(const Config& cfg, const Tolerances& tol) {
    const Input in = read_input(cfg);
    const TaggingUnitary u(in.matrix, tol);
    bool certain = false;
    json report = envelope("attack", cfg, tol, &in);
    report["result"] = attack_report(u, cfg, tol, certain);
    emit(report, cfg.out);
    return certain ? kExitInsecure : kExitOk;
}

int cmd_optimize(const Config& cfg, const Tolerances& tol) {
    OptimizeOptions opt;
    opt.restarts = cfg.restarts;
    opt.budget = cfg.budget == 0 ? 2000 : cfg.budget;
    opt.seed = cfg.seed;
    opt.workers = cfg.workers;
    opt.score.rule = parse_score_rule(cfg.score_rule);
    opt.score.no_message_weight = cfg.no_message_weight;
    opt.score.attack_budget = {cfg.attack_budget, 0, 1};
    opt.score.priors = parse_priors(cfg.priors);
    std::optional<Input> warm;
    if (!cfg.warm_start.empty()) {
        warm = Input{load_matrix(cfg.warm_start), cfg.warm_start};
        opt.warm_start = warm->matrix;
    }
    const OptimizeResult r = optimize(opt, tol);
    json report = envelope("optimize", cfg, tol, warm ? &*warm : nullptr);
    report["result"] = to_json(r, opt);
    report["result"]["best_sha256"] = matrix_hash(r.best);
    if (!cfg.trace.empty()) {
        write_text(cfg.trace, trace_jsonl(r));
    }
    emit(report, cfg.out);
    return kExitOk;
}

int cmd_demo(const Config& cfg, const Tolerances& tol) {
    const TaggingUnitary u = TaggingUnitary::worked_example();
    const Input in{u.matrix(), "built-in worked example"};
    const ConditionReport v =
        validate(u, AdvisoryOptions{true, {cfg.budget == 0 ? 10000 : cfg.budget, cfg.seed, cfg.workers}, {}}, tol);
    bool certain = false;
    const json attacks = attack_report(u, cfg, tol, certain);

    std::ostringstream s;
    s << "Tagging unitary (message basis):\n" << u.matrix().str() << "\n";
    s << "Rows of M0: (1/2, 1/2) and (0, 0); they are orthogonal, so the first no-message case applies.\n";
    s << "  case 1: " << (v.case1.satisfied ? "satisfied" : "violated") << " (margin " << v.case1.margin << ")\n";
    s << "  condition 3: " << (v.condition3.satisfied ? "satisfied" : "violated") << " (swap residual "
      << v.condition3.details.at("swap_residual").get<double>() << ")\n";
    s << "  condition 4: " << (v.condition4.satisfied ? "satisfied" : "violated") << "\n";
    s << "Verdict: " << (v.overall_secure ? "secure" : "insecure") << "\n\n";
    s << "No-message forgery, best injected state: " << v.no_message_optimal->probability << "\n";
    s << "  best state with e2 = e3 = 0 (grid): "
      << attacks["no_message"]["restricted_grid"]["probability"].get<double>() << "\n";
    s << "Message substitution, best unitary found (budget " << v.best_message_attack->budget
      << "): " << v.best_message_attack->probability << "\n";
    s << "Key-distinguishing measurement possible: "
      << (attacks["key_distinguishing"]["distinguishable"].get<bool>() ? "yes" : "no") << "\n";
    s << "Certain forgery with a reused key ruled out: "
      << (attacks["key_reuse"]["ruled_out"].get<bool>() ? "yes" : "no") << " (marking attack succeeds with p = "
      << attacks["key_reuse"]["simulation"]["forgery_probability"].get<double>() << ")\n";
    std::cout << s.str();

    if (!cfg.out.empty()) {
        json report = envelope("demo", cfg, tol, &in);
        report["result"] = {{"validate", to_json(v)}, {"attack", attacks}};
        emit(report, cfg.out);
    }
    return v.overall_secure ? kExitOk : kExitInsecure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmac: quantum message authentication with tagging unitaries"};
    app.set_version_flag("--version", std::string("qmac ") + QMAC_VERSION);
    app.require_subcommand(1);
    Config cfg;

    auto common = [&](CLI::App* sub, bool needs_input) {
        auto* in = sub->add_option("--input", cfg.input, "Tagging unitary as matrix JSON")->check(CLI::ExistingFile);
        if (needs_input) {
            in->required();
        }
        sub->add_option("--seed", cfg.seed, "Random seed (default 0)");
        sub->add_option("--out", cfg.out, "Write the JSON report here instead of stdout");
        sub->add_option("--tol", cfg.tol_overrides, "Tolerance override NAME=VALUE (repeatable)");
        sub->add_option("--workers", cfg.workers, "Worker threads (0: all cores; results do not depend on this)");
    };

    auto* validate_cmd = app.add_subcommand("validate", "Check the security conditions of a tagging unitary");
    common(validate_cmd, true);
    validate_cmd->add_option("--budget", cfg.budget, "Evaluation budget of the advisory message-attack search");
    validate_cmd->add_option("--priors", cfg.priors, "Message priors p0,p1");

    auto* simulate_cmd = app.add_subcommand("simulate", "Run honest protocol rounds");
    common(simulate_cmd, true);
    simulate_cmd->add_option("--trials", cfg.simulate_trials, "Trials per message bit (default 1000)");
    simulate_cmd->add_flag("--records", cfg.records, "Include every run record in the report");

    auto* attack_cmd = app.add_subcommand("attack", "Run every forgery analysis");
    common(attack_cmd, true);
    attack_cmd->add_option("--trials", cfg.trials, "Monte Carlo trials per cross-check (default 100000)");
    attack_cmd->add_option("--budget", cfg.budget, "Message-attack search budget (default 10000)");
    attack_cmd->add_option("--priors", cfg.priors, "Message priors p0,p1");

    auto* optimize_cmd = app.add_subcommand("optimize", "Search for secure tagging unitaries (heuristic score)");
    common(optimize_cmd, false);
    optimize_cmd->add_option("--restarts", cfg.restarts, "Number of Haar restarts (default 1)");
    optimize_cmd->add_option("--budget", cfg.budget, "Score evaluations per restart (default 2000)");
    optimize_cmd->add_option("--attack-budget", cfg.attack_budget, "Inner message-attack budget per score (default 2500)");
    optimize_cmd->add_option("--warm-start", cfg.warm_start, "Matrix JSON used as restart 0")
        ->check(CLI::ExistingFile);
    optimize_cmd->add_option("--trace", cfg.trace, "Write the search trace as JSONL here");
    optimize_cmd->add_option("--score", cfg.score_rule, "worst_case or weighted_sum");
    optimize_cmd->add_option("--weight", cfg.no_message_weight, "No-message weight for weighted_sum");
    optimize_cmd->add_option("--priors", cfg.priors, "Message priors p0,p1");

    auto* demo_cmd = app.add_subcommand("demo", "Validate and attack the built-in worked example");
    common(demo_cmd, false);
    demo_cmd->add_option("--trials", cfg.trials, "Monte Carlo trials per cross-check (default 100000)");
    demo_cmd->add_option("--budget", cfg.budget, "Message-attack search budget (default 10000)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        const Tolerances tol = parse_tolerances(cfg.tol_overrides);
        if (*validate_cmd) {
            return cmd_validate(cfg, tol);
        }
        if (*simulate_cmd) {
            return cmd_simulate(cfg, tol);
        }
        if (*attack_cmd) {
            return cmd_attack(cfg, tol);
        }
        if (*optimize_cmd) {
            return cmd_optimize(cfg, tol);
        }
        return cmd_demo(cfg, tol);
    } catch (const std::invalid_argument& e) {
        std::cerr << "qmac: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "qmac: " << e.what() << "\n";
        return kExitInternal;
    }
}
