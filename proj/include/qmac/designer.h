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

#ifndef QMAC_DESIGNER_H
#define QMAC_DESIGNER_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmac/adversary.h"
#include "qmac/protocol.h"
#include "qmac/tolerances.h"

namespace qmac {

// Search for tagging unitaries that pass validation and keep both forgery
// probabilities low. Scores are heuristic: the message-attack term is a
// search value, not a proven optimum.

enum class ScoreRule { worst_case, weighted_sum };

std::string to_string(ScoreRule r);
/// Throws std::invalid_argument for names other than "worst_case" and "weighted_sum".
ScoreRule parse_score_rule(const std::string& name);

struct ScoreOptions {
    ScoreRule rule = ScoreRule::worst_case;
    /// Weight of the no-message term under weighted_sum; the message term gets 1 - w.
    double no_message_weight = 0.5;
    /// Inner message-attack search. Its seed is fixed so the score is a function of u.
    SearchBudget attack_budget{2500, 0, 1};
    Priors priors{};

    void validate() const;
};

struct SecurityScore {
    double pf_no_message = 0;
    double pf_message_best = 0;
    bool secure = false;
    double score = 0;  // +infinity when insecure
};

/// JSON with "score": null for the insecure sentinel, and a "heuristic" label.
nlohmann::json to_json(const SecurityScore& s, const ScoreOptions& options);

SecurityScore security_score(const TaggingUnitary& u, const ScoreOptions& options = {}, const Tolerances& tol = {});

struct OptimizeOptions {
    int restarts = 1;
    std::uint64_t budget = 2000;  // score evaluations per restart
    std::uint64_t seed = 0;
    unsigned workers = 0;  // 0: hardware concurrency; the result does not depend on this
    /// Haar draws per restart before giving up on finding a secure start.
    int max_start_draws = 10000;
    std::optional<ComplexMatrix> warm_start;  // replaces restart 0's Haar start
    ScoreOptions score{};
};

struct TraceEntry {
    int restart = 0;
    std::uint64_t iter = 0;  // score evaluations spent in this restart
    double score = 0;
};

struct OptimizeResult {
    ComplexMatrix best;
    SecurityScore score;
    int best_restart = -1;
    std::vector<double> restart_scores;  // +infinity for restarts without a secure start
    std::vector<TraceEntry> trace;       // per restart, non-increasing in score
    std::uint64_t evaluations = 0;
};

/// Multi-start descent of the score over the Hermitian-generator chart.
/// Each restart draws Haar unitaries from its own stream until one passes
/// validation, then runs coordinate search on that start; insecure
/// neighbours score +infinity and are never accepted. The best restart wins,
/// ties to the lowest index. Throws std::invalid_argument if restarts < 1,
/// budget < 1, the warm start is not a secure unitary, or no restart finds a
/// secure start.
OptimizeResult optimize(const OptimizeOptions& options, const Tolerances& tol = {});

nlohmann::json to_json(const OptimizeResult& r, const OptimizeOptions& options);

/// One {"restart", "iter", "score"} object per line.
std::string trace_jsonl(const OptimizeResult& r);

}  // namespace qmac

#endif
