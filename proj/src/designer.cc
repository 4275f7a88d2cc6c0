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

#include "qmac/designer.h"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qmac/conditions.h"
#include "qmac/linalg.h"
#include "qmac/matrix_json.h"
#include "qmac/search.h"

namespace qmac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json score_value(double s) {
    return std::isfinite(s) ? nlohmann::json(s) : nlohmann::json(nullptr);
}

}  // namespace

std::string to_string(ScoreRule r) {
    return r == ScoreRule::worst_case ? "worst_case" : "weighted_sum";
}

ScoreRule parse_score_rule(const std::string& name) {
    if (name == "worst_case") {
        return ScoreRule::worst_case;
    }
    if (name == "weighted_sum") {
        return ScoreRule::weighted_sum;
    }
    throw std::invalid_argument("unknown score rule '" + name + "' (expected worst_case or weighted_sum)");
}

void ScoreOptions::validate() const {
    if (!(no_message_weight >= 0 && no_message_weight <= 1)) {
        throw std::invalid_argument("no-message weight must lie in [0, 1]");
    }
    if (attack_budget.evaluations == 0) {
        throw std::invalid_argument("inner attack budget must be at least 1");
    }
    priors.validate();
}

nlohmann::json to_json(const SecurityScore& s, const ScoreOptions& options) {
    return {
        {"pf_no_message", s.pf_no_message},
        {"pf_message_best", s.pf_message_best},
        {"secure", s.secure},
        {"score", score_value(s.score)},
        {"rule", to_string(options.rule)},
        {"no_message_weight", options.no_message_weight},
        {"attack_budget", options.attack_budget.evaluations},
        {"attack_seed", options.attack_budget.seed},
        {"heuristic", true},
    };
}

SecurityScore security_score(const TaggingUnitary& u, const ScoreOptions& options, const Tolerances& tol) {
    options.validate();
    SecurityScore s;
    s.secure = validate(u, AdvisoryOptions{false, {}, {}}, tol).overall_secure;
    s.pf_no_message = no_message_optimal(u, tol).probability;
    s.pf_message_best = best_message_attack(u, options.priors, options.attack_budget, tol).probability;
    if (!s.secure) {
        s.score = kInf;
    } else if (options.rule == ScoreRule::worst_case) {
        s.score = std::max(s.pf_no_message, s.pf_message_best);
    } else {
        const double w = options.no_message_weight;
        s.score = w * s.pf_no_message + (1 - w) * s.pf_message_best;
    }
    return s;
}

namespace {

struct RestartOutcome {
    ComplexMatrix point;
    double score = kInf;
    std::uint64_t evaluations = 0;
    std::vector<std::pair<std::uint64_t, double>> trace;
};

bool is_secure(const ComplexMatrix& m, const Tolerances& tol) {
    return validate(TaggingUnitary(m, tol), AdvisoryOptions{false, {}, {}}, tol).overall_secure;
}

}  // namespace

OptimizeResult optimize(const OptimizeOptions& options, const Tolerances& tol) {
    if (options.restarts < 1) {
        throw std::invalid_argument("optimize needs at least one restart");
    }
    if (options.budget < 1) {
        throw std::invalid_argument("optimize needs a budget of at least one evaluation per restart");
    }
    options.score.validate();
    if (options.warm_start && !is_secure(*options.warm_start, tol)) {
        throw std::invalid_argument("warm start does not pass validation");
    }

    // Coordinate search maximizes, so it sees the negated score.
    const std::function<double(const ComplexMatrix&)> objective = [&](const ComplexMatrix& m) {
        const auto check = is_unitary(m, tol.unitarity);
        if (!check.unitary) {
            return -kInf;
        }
        return -security_score(TaggingUnitary(m, tol), options.score, tol).score;
    };

    const auto n = static_cast<std::size_t>(options.restarts);
    std::vector<RestartOutcome> outcomes(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
        ComplexMatrix start;
        if (i == 0 && options.warm_start) {
            start = *options.warm_start;
        } else {
            Rng rng = make_rng(options.seed, i);
            for (int d = 0; d < options.max_start_draws && start.empty(); ++d) {
                ComplexMatrix cand = haar_random_unitary(kMessageDim, rng);
                if (is_secure(cand, tol)) {
                    start = std::move(cand);
                }
            }
        }
        if (start.empty()) {
            return;
        }
        const auto run = coordinate_search(start, objective, options.budget, tol);
        outcomes[i] = {run.point, -run.value, run.evaluations, run.trace};
    });

    OptimizeResult r;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = outcomes[i];
        r.restart_scores.push_back(o.score);
        r.evaluations += o.evaluations;
        for (const auto& [iter, value] : o.trace) {
            r.trace.push_back({static_cast<int>(i), iter, -value});
        }
        if (std::isfinite(o.score) && (r.best_restart < 0 || o.score < outcomes[r.best_restart].score)) {
            r.best_restart = static_cast<int>(i);
        }
    }
    if (r.best_restart < 0) {
        throw std::invalid_argument("no restart found a unitary that passes validation");
    }
    r.best = outcomes[r.best_restart].point;
    r.score = security_score(TaggingUnitary(r.best, tol), options.score, tol);
    return r;
}

nlohmann::json to_json(const OptimizeResult& r, const OptimizeOptions& options) {
    nlohmann::json restarts = nlohmann::json::array();
    for (double s : r.restart_scores) {
        restarts.push_back(score_value(s));
    }
    return {
        {"best", matrix_to_json(r.best)},
        {"best_restart", r.best_restart},
        {"score", to_json(r.score, options.score)},
        {"restart_scores", restarts},
        {"restarts", options.restarts},
        {"budget", options.budget},
        {"seed", options.seed},
        {"warm_start", options.warm_start.has_value()},
        {"evaluations", r.evaluations},
        {"heuristic", true},
    };
}

std::string trace_jsonl(const OptimizeResult& r) {
    std::ostringstream out;
    for (const auto& e : r.trace) {
        out << nlohmann::json{{"restart", e.restart}, {"iter", e.iter}, {"score", score_value(e.score)}}.dump()
            << '\n';
    }
    return out.str();
}

}  // namespace qmac
