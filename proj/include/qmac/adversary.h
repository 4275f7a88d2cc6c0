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

#ifndef QMAC_ADVERSARY_H
#define QMAC_ADVERSARY_H

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmac/matrix.h"
#include "qmac/protocol.h"
#include "qmac/rng.h"
#include "qmac/tolerances.h"

namespace qmac {

// ---------------------------------------------------------------------------
// No-message forgery: Eve sends a state of her own while Alice is silent.
// ---------------------------------------------------------------------------

/// Eve's injected pure state sum_i e_i |phi_i>.
class EveNoMessageState {
   public:
    explicit EveNoMessageState(ComplexMatrix coefficients, const Tolerances& tol = {});

    /// The state with e_2 = e_3 = 0, |e_0| = abs_e0 and the cross-term phase
    /// (see `theta`) equal to `theta`.
    static EveNoMessageState restricted(const TaggingUnitary& u, double abs_e0, double theta);

    const ComplexMatrix& coefficients() const { return coef_; }
    double abs_e0() const { return std::abs(coef_[0]); }
    /// Phase of conj(e_0) e_1 (r_0 r_1^dag) for the rows r_0, r_1 of M0: the angle of the
    /// cross term in the restricted forgery probability. Zero when either factor vanishes.
    double theta(const TaggingUnitary& u) const;

   private:
    ComplexMatrix coef_;
};

enum class AttackMethod { closed_form, eigen_optimal, grid_oracle, search };

std::string to_string(AttackMethod m);

struct AttackResult {
    double probability = 0;
    ComplexMatrix strategy;  // Eve's state (4x1) or attack unitary (4x4)
    AttackMethod method = AttackMethod::closed_form;
    std::uint64_t budget = 0;
    std::uint64_t evaluations = 0;
    std::uint64_t seed = 0;
    int restarts = 0;
};

nlohmann::json to_json(const AttackResult& r);

/// 1/2 sum_{i=0,1} (|e_i|^2 + |<eps|U|phi_i>|^2).
double no_message_pf(const TaggingUnitary& u, const EveNoMessageState& eve);

/// Same probability for a mixed injected state: Tr(rho (U P U^dag + P)) / 2.
double no_message_pf(const TaggingUnitary& u, const ComplexMatrix& rho);

/// Closed form of no_message_pf on `EveNoMessageState::restricted(u, abs_e0, theta)`:
/// 1/2 [x |e0|^2 + y |e0| sqrt(1 - |e0|^2) cos(theta) + z] + 1/2 with
/// x = |r0|^2 - |r1|^2, y = 2 |r1 r0^dag|, z = |r1|^2 for the rows r0, r1 of M0.
double no_message_pf_restricted(const TaggingUnitary& u, double abs_e0, double theta);

/// Q = U P U^dag + P. Eve's best probability is lambda_max(Q) / 2, attained by a top eigenvector.
ComplexMatrix forgery_operator(const TaggingUnitary& u);
AttackResult no_message_optimal(const TaggingUnitary& u, const Tolerances& tol = {});

/// Best restricted state on an (|e0|, theta) grid: |e0| in {0, 1/(n-1), ..., 1},
/// theta in {0, 2 pi / m, ...}.
AttackResult no_message_restricted_grid(const TaggingUnitary& u, int abs_steps = 101, int theta_steps = 64);

// ---------------------------------------------------------------------------
// Message substitution: Eve applies a unitary V to the message in flight and
// wins if Bob accepts the other bit.
// ---------------------------------------------------------------------------

struct Priors {
    double p0 = 0.5;
    double p1 = 0.5;
    /// Throws std::invalid_argument unless p0, p1 >= 0 and p0 + p1 = 1 (within 1e-12).
    void validate() const;
};

/// sum_i p_i 1/2 (|<phi_j|V|phi_i>|^2 + |<phi_j|U^dag V U|phi_i>|^2), j = 1 - i.
double message_attack_pf(const TaggingUnitary& u, const ComplexMatrix& v, const Priors& priors = {},
                         const Tolerances& tol = {});

/// Whether M0^0 = e^{i gamma} S(delta) sigma_x M0^1 for some phases gamma, delta
/// (S(delta) = diag(1, e^{i delta})). With M0^1 = (p, q) the right side is
/// (e^{i gamma} q, e^{i(gamma+delta)} p), so this is a pair of modulus equalities.
struct SwapRelation {
    bool holds = false;
    double residual = 0;  // max of the two modulus mismatches
    double gamma = 0;
    double delta = 0;
};

SwapRelation swap_relation(const TaggingUnitary& u, const Tolerances& tol = {});

/// A unitary V with message_attack_pf(u, V) = 1 for every prior, if one exists.
///
/// V is block diagonal, diag(S(delta) sigma_x, W). Such a V exists exactly when
/// the swap relation holds: unitarity of U then forces the lower-left block
/// columns (a, b) to have the same Gram matrix as (c0 b, c1 a), so a unitary W
/// carrying one pair onto the other always exists.
std::optional<ComplexMatrix> perfect_message_attack(const TaggingUnitary& u, const Tolerances& tol = {});

struct SearchBudget {
    std::uint64_t evaluations = 10000;
    std::uint64_t seed = 0;
    unsigned workers = 0;  // 0: hardware concurrency; the result does not depend on this
};

/// Multi-start coordinate search over V = V0 exp(i H) (16 real generator
/// coordinates, re-centred after every accepted move). Each Haar restart gets
/// an equal share of the evaluation budget and its own random stream; the
/// best restart wins, ties to the lowest index.
AttackResult best_message_attack(const TaggingUnitary& u, const Priors& priors, const SearchBudget& budget,
                                 const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Key-distinguishing measurement and key reuse.
// ---------------------------------------------------------------------------

struct KeyDistinguishability {
    bool distinguishable = false;
    std::array<Complex, 4> gram{};  // <phi_i|U|phi_j>, index 2i + j
};

/// Eve can tell the two tagged branches apart iff <phi_i|U|phi_j> = 0 for all i, j in {0, 1}.
KeyDistinguishability key_distinguishability(const TaggingUnitary& u, const Tolerances& tol = {});

struct KeyReuseFeasibility {
    bool ruled_out = false;
    std::optional<int> witness;
    std::array<double, 2> diagonal{};  // |<phi_i|U|phi_i>|
};

/// Certainty forgery on a reused key is impossible if some |<phi_i|U|phi_i>| > 0:
/// a unitary cannot send the non-orthogonal pair (phi_i, U phi_i) to outputs
/// tagged by orthogonal ancilla states. Otherwise the criterion is inconclusive.
KeyReuseFeasibility key_reuse_feasibility(const TaggingUnitary& u, const Tolerances& tol = {});

/// Target key-ancilla correlation alpha |01>|a> - beta |10>|a_perp>.
struct KeyReuseAttackSpec {
    Complex alpha = 1 / std::sqrt(2.0);
    Complex beta = 1 / std::sqrt(2.0);
    ComplexMatrix ancilla;       // |a>
    ComplexMatrix ancilla_perp;  // |a_perp>

    /// Qubit ancilla with |a> = |0>, |a_perp> = |1>.
    static KeyReuseAttackSpec qubit();
    void validate(const Tolerances& tol = {}) const;
    std::size_t ancilla_dim() const { return ancilla.size(); }
    /// The correlated key-ancilla state, on A x B x ancilla.
    ComplexMatrix target_state() const;
};

struct KeyReuseConfig {
    int rounds = 1;
    std::uint64_t trials = 10000;
    KeyReuseAttackSpec spec = KeyReuseAttackSpec::qubit();
    /// Eve's interaction on message x ancilla, (4 d) x (4 d); index e * d + x.
    ComplexMatrix interaction;
    /// Eve's ancilla before the first round.
    ComplexMatrix ancilla_initial;
    int forged_bit = 0;
};

struct KeyReuseStats {
    std::vector<double> acceptance_per_round;  // fraction of trials still alive that passed round r
    std::vector<double> decode_accuracy_per_round;  // accepted with the sent bit, same denominator
    std::vector<double> key_fidelity_per_round;     // mean singlet fidelity after accepted rounds
    std::uint64_t trials = 0;
    std::uint64_t surviving = 0;               // trials whose key survived every round
    double mean_key_fidelity = 0;              // over surviving trials
    double mean_target_fidelity = 0;           // |<target|key x ancilla>|^2 over surviving trials
    double forgery_frequency = 0;              // reuse-round forgeries accepted as forged_bit / surviving
    double forgery_probability = 0;            // mean exact success probability / surviving
};

nlohmann::json to_json(const KeyReuseStats& s);

/// Identity interaction for the given ancilla dimension.
ComplexMatrix no_interaction(std::size_t ancilla_dim);

/// 1 (x) |a><a| on accepted messages, sigma_x-style ancilla flip a <-> a_perp on
/// rejected ones: Eve marks whether the message left the accept subspace.
ComplexMatrix subspace_marking_interaction(const KeyReuseAttackSpec& spec);

/// Rounds of tagged transmission with Eve's interaction in the channel; the key
/// is kept only while rounds are accepted. Surviving trials end with Eve's
/// reuse-round forgery: she prepares |phi_forged>, applies U controlled on
/// her ancilla being |a_perp>, and Bob decodes and measures. States are cached
/// by (bit, outcome) history, so cost grows with distinct histories, not trials.
KeyReuseStats simulate_key_reuse(const TaggingUnitary& u, const KeyReuseConfig& config, Rng& rng,
                                 const Tolerances& tol = {});

/// Exact success probability of the reuse-round forgery when the key and
/// ancilla are in `key_ancilla` (A x B x ancilla, normalized).
double reuse_forgery_probability(const TaggingUnitary& u, const KeyReuseAttackSpec& spec,
                                 const ComplexMatrix& key_ancilla, int forged_bit);

// ---------------------------------------------------------------------------
// Monte Carlo cross-checks through the full protocol simulation.
// ---------------------------------------------------------------------------

struct Frequency {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
    double value() const { return trials == 0 ? 0.0 : static_cast<double>(hits) / trials; }
};

/// Eve injects `eve` in place of Alice's message; Bob decodes and measures.
Frequency simulate_no_message(const TaggingUnitary& u, const ComplexMatrix& eve, std::uint64_t trials, Rng& rng);

/// Alice sends bit i with probability p_i, Eve applies V in the channel; a hit
/// is Bob accepting the flipped bit.
Frequency simulate_message_attack(const TaggingUnitary& u, const ComplexMatrix& v, const Priors& priors,
                                  std::uint64_t trials, Rng& rng);

}  // namespace qmac

#endif
