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

#include "qmac/adversary.h"

#include <algorithm>
#include <map>
#include <numbers>
#include <stdexcept>

#include "qmac/linalg.h"
#include "qmac/matrix_json.h"
#include "qmac/search.h"

namespace qmac {

namespace {

// r_0 r_1^dag for the rows of M0.
Complex row_overlap(const TaggingUnitary& u) {
    return u(0, 0) * std::conj(u(1, 0)) + u(0, 1) * std::conj(u(1, 1));
}

double row_norm_sq(const TaggingUnitary& u, std::size_t r) {
    return std::norm(u(r, 0)) + std::norm(u(r, 1));
}

}  // namespace

EveNoMessageState::EveNoMessageState(ComplexMatrix coefficients, const Tolerances& tol) : coef_(std::move(coefficients)) {
    if (coef_.rows() != kMessageDim || coef_.cols() != 1) {
        throw std::invalid_argument("Eve's state must be a 4-dimensional column vector");
    }
    const double n = norm(coef_);
    if (std::abs(n * n - 1) > tol.normalization) {
        throw std::invalid_argument("Eve's state is not normalized (norm^2 = " + format_deviation(n * n) + ")");
    }
}

EveNoMessageState EveNoMessageState::restricted(const TaggingUnitary& u, double abs_e0, double theta) {
    if (!(abs_e0 >= 0 && abs_e0 <= 1)) {
        throw std::invalid_argument("|e0| must lie in [0, 1]");
    }
    const Complex w = row_overlap(u);
    const double phase = w == Complex{} ? theta : theta - std::arg(w);
    ComplexMatrix c(kMessageDim, 1);
    c[0] = abs_e0;
    c[1] = std::polar(std::sqrt(std::max(0.0, 1 - abs_e0 * abs_e0)), phase);
    return EveNoMessageState(std::move(c));
}

double EveNoMessageState::theta(const TaggingUnitary& u) const {
    const Complex t = std::conj(coef_[0]) * coef_[1] * row_overlap(u);
    return t == Complex{} ? 0.0 : std::arg(t);
}

std::string to_string(AttackMethod m) {
    switch (m) {
        case AttackMethod::closed_form:
            return "closed_form";
        case AttackMethod::eigen_optimal:
            return "eigen_optimal";
        case AttackMethod::grid_oracle:
            return "grid_oracle";
        case AttackMethod::search:
            return "search";
    }
    return "unknown";
}

nlohmann::json to_json(const AttackResult& r) {
    return {
        {"probability", r.probability},
        {"method", to_string(r.method)},
        {"strategy", matrix_to_json(r.strategy)},
        {"budget", r.budget},
        {"evaluations", r.evaluations},
        {"restarts", r.restarts},
        {"seed", r.seed},
    };
}

double no_message_pf(const TaggingUnitary& u, const EveNoMessageState& eve) {
    const auto& e = eve.coefficients();
    double pf = 0;
    for (std::size_t i = 0; i < 2; ++i) {
        // <eps|U|phi_i> = sum_k conj(e_k) U_ki
        Complex amp = 0;
        for (std::size_t k = 0; k < kMessageDim; ++k) {
            amp += std::conj(e[k]) * u(k, i);
        }
        pf += std::norm(e[i]) + std::norm(amp);
    }
    return std::clamp(0.5 * pf, 0.0, 1.0);
}

ComplexMatrix forgery_operator(const TaggingUnitary& u) {
    const auto p = accept_projector();
    return u.matrix() * p * u.matrix().adjoint() + p;
}

double no_message_pf(const TaggingUnitary& u, const ComplexMatrix& rho) {
    if (rho.rows() != kMessageDim || rho.cols() != kMessageDim) {
        throw std::invalid_argument("no_message_pf: expected a 4x4 density operator");
    }
    return 0.5 * (rho * forgery_operator(u)).trace().real();
}

double no_message_pf_restricted(const TaggingUnitary& u, double abs_e0, double theta) {
    if (!(abs_e0 >= 0 && abs_e0 <= 1)) {
        throw std::invalid_argument("|e0| must lie in [0, 1]");
    }
    const double n0 = row_norm_sq(u, 0);
    const double n1 = row_norm_sq(u, 1);
    const double x = n0 - n1;
    const double y = 2 * std::abs(row_overlap(u));
    const double z = n1;
    const double cross = y * abs_e0 * std::sqrt(std::max(0.0, 1 - abs_e0 * abs_e0)) * std::cos(theta);
    return 0.5 * (x * abs_e0 * abs_e0 + cross + z) + 0.5;
}

AttackResult no_message_optimal(const TaggingUnitary& u, const Tolerances& tol) {
    const auto e = eig_hermitian(forgery_operator(u), tol);
    AttackResult r;
    r.method = AttackMethod::eigen_optimal;
    r.probability = std::clamp(e.eigenvalues.back() / 2, 0.0, 1.0);
    r.strategy = e.eigenvectors.col(kMessageDim - 1);
    return r;
}

AttackResult no_message_restricted_grid(const TaggingUnitary& u, int abs_steps, int theta_steps) {
    if (abs_steps < 2 || theta_steps < 1) {
        throw std::invalid_argument("grid needs at least 2 |e0| steps and 1 theta step");
    }
    double best = -1;
    double best_abs = 0;
    double best_theta = 0;
    for (int a = 0; a < abs_steps; ++a) {
        const double abs_e0 = static_cast<double>(a) / (abs_steps - 1);
        for (int t = 0; t < theta_steps; ++t) {
            const double theta = 2 * std::numbers::pi * t / theta_steps;
            const double v = no_message_pf_restricted(u, abs_e0, theta);
            if (v > best) {
                best = v;
                best_abs = abs_e0;
                best_theta = theta;
            }
        }
    }
    AttackResult r;
    r.method = AttackMethod::grid_oracle;
    r.probability = std::clamp(best, 0.0, 1.0);
    r.strategy = EveNoMessageState::restricted(u, best_abs, best_theta).coefficients();
    r.evaluations = static_cast<std::uint64_t>(abs_steps) * theta_steps;
    return r;
}

void Priors::validate() const {
    if (!(p0 >= 0 && p1 >= 0) || std::abs(p0 + p1 - 1) > 1e-12) {
        throw std::invalid_argument("priors must be non-negative and sum to 1");
    }
}

namespace {

// message_attack_pf with the tagging columns cached; no validation.
class MessageObjective {
   public:
    MessageObjective(const TaggingUnitary& u, const Priors& priors) : p0_(priors.p0), p1_(priors.p1) {
        for (std::size_t r = 0; r < kMessageDim; ++r) {
            c0_[r] = u(r, 0);
            c1_[r] = u(r, 1);
        }
    }

    double operator()(const ComplexMatrix& v) const {
        Complex t10 = 0;  // c1^dag V c0
        Complex t01 = 0;  // c0^dag V c1
        for (std::size_t r = 0; r < kMessageDim; ++r) {
            Complex vc0 = 0;
            Complex vc1 = 0;
            for (std::size_t k = 0; k < kMessageDim; ++k) {
                vc0 += v(r, k) * c0_[k];
                vc1 += v(r, k) * c1_[k];
            }
            t10 += std::conj(c1_[r]) * vc0;
            t01 += std::conj(c0_[r]) * vc1;
        }
        const double from0 = 0.5 * (std::norm(v(1, 0)) + std::norm(t10));
        const double from1 = 0.5 * (std::norm(v(0, 1)) + std::norm(t01));
        return p0_ * from0 + p1_ * from1;
    }

   private:
    double p0_;
    double p1_;
    std::array<Complex, kMessageDim> c0_{};
    std::array<Complex, kMessageDim> c1_{};
};

}  // namespace

double message_attack_pf(const TaggingUnitary& u, const ComplexMatrix& v, const Priors& priors,
                         const Tolerances& tol) {
    priors.validate();
    if (v.rows() != kMessageDim || v.cols() != kMessageDim) {
        throw std::invalid_argument("attack operation must be 4x4");
    }
    const auto check = is_unitary(v, tol.unitarity);
    if (!check.unitary) {
        throw std::invalid_argument("attack operation is not unitary (deviation " + format_deviation(check.deviation) +
                                    ")");
    }
    return std::clamp(MessageObjective(u, priors)(v), 0.0, 1.0);
}

SwapRelation swap_relation(const TaggingUnitary& u, const Tolerances& tol) {
    const Complex a0 = u(0, 0);  // M0^0
    const Complex a1 = u(1, 0);
    const Complex p = u(0, 1);  // M0^1 = (p, q)
    const Complex q = u(1, 1);
    SwapRelation rel;
    rel.residual = std::max(std::abs(std::abs(a0) - std::abs(q)), std::abs(std::abs(a1) - std::abs(p)));
    rel.holds = rel.residual <= tol.phase_equivalence;
    const double g = std::abs(q) > tol.vanishing && std::abs(a0) > tol.vanishing ? std::arg(a0 / q) : 0.0;
    const double gd = std::abs(p) > tol.vanishing && std::abs(a1) > tol.vanishing ? std::arg(a1 / p) : g;
    rel.gamma = g;
    rel.delta = std::remainder(gd - g, 2 * std::numbers::pi);
    return rel;
}

namespace {

ComplexMatrix unit_complement(const ComplexMatrix& e) {
    return ComplexMatrix{{-std::conj(e[1])}, {std::conj(e[0])}};
}

// Unitary W on C^2 with W a = ta and W b = tb, given that (a, b) and (ta, tb)
// have the same Gram matrix.
ComplexMatrix match_pair(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& ta,
                         const ComplexMatrix& tb, const Tolerances& tol) {
    const double na = norm(a);
    if (na <= tol.vanishing) {
        return ComplexMatrix::identity(2);
    }
    const ComplexMatrix e1 = a * Complex(1 / na);
    const ComplexMatrix f1 = ta * Complex(1 / na);
    const Complex c = inner(e1, b);
    const ComplexMatrix rb = b - c * e1;
    const ComplexMatrix rt = tb - c * f1;
    ComplexMatrix e2;
    ComplexMatrix f2;
    if (norm(rb) > tol.vanishing && norm(rt) > tol.vanishing) {
        e2 = rb * Complex(1 / norm(rb));
        f2 = rt * Complex(1 / norm(rt));
    } else {
        e2 = unit_complement(e1);
        f2 = unit_complement(f1);
    }
    const ComplexMatrix w = f1 * e1.adjoint() + f2 * e2.adjoint();
    return nearest_unitary(w, tol);
}

}  // namespace

std::optional<ComplexMatrix> perfect_message_attack(const TaggingUnitary& u, const Tolerances& tol) {
    const SwapRelation rel = swap_relation(u, tol);
    if (!rel.holds) {
        return std::nullopt;
    }
    // Top block S(delta) sigma_x. It maps M0^1 to e^{-i gamma} M0^0 and M0^0 to
    // e^{i(gamma + delta)} M0^1; the lower block must do the same to M2^1 and M2^0.
    const Complex c0 = std::polar(1.0, rel.gamma + rel.delta);
    const Complex c1 = std::polar(1.0, -rel.gamma);
    const ComplexMatrix a = u.block_column(2, 0);
    const ComplexMatrix b = u.block_column(2, 1);
    const ComplexMatrix w = match_pair(a, b, c0 * b, c1 * a, tol);

    ComplexMatrix v(kMessageDim, kMessageDim);
    v(0, 1) = 1.0;
    v(1, 0) = std::polar(1.0, rel.delta);
    v.set_block(2, 2, w);
    return v;
}

AttackResult best_message_attack(const TaggingUnitary& u, const Priors& priors, const SearchBudget& budget,
                                 const Tolerances& tol) {
    priors.validate();
    if (budget.evaluations == 0) {
        throw std::invalid_argument("search budget must be at least 1 evaluation");
    }
    static constexpr std::uint64_t kEvaluationsPerRestart = 2500;
    const std::uint64_t restarts = std::max<std::uint64_t>(1, budget.evaluations / kEvaluationsPerRestart);
    const MessageObjective objective(u, priors);
    const std::function<double(const ComplexMatrix&)> f = [&](const ComplexMatrix& v) { return objective(v); };

    std::vector<CoordinateSearchResult> runs(restarts);
    parallel_for(restarts, budget.workers, [&](std::size_t i) {
        Rng rng = make_rng(budget.seed, i);
        const std::uint64_t share = budget.evaluations / restarts + (i < budget.evaluations % restarts ? 1 : 0);
        runs[i] = coordinate_search(haar_random_unitary(kMessageDim, rng), f, share, tol);
    });

    std::size_t best = 0;
    std::uint64_t used = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        used += runs[i].evaluations;
        if (runs[i].value > runs[best].value) {
            best = i;
        }
    }
    AttackResult r;
    r.method = AttackMethod::search;
    r.probability = std::clamp(runs[best].value, 0.0, 1.0);
    r.strategy = runs[best].point;
    r.budget = budget.evaluations;
    r.evaluations = used;
    r.seed = budget.seed;
    r.restarts = static_cast<int>(restarts);
    return r;
}

KeyDistinguishability key_distinguishability(const TaggingUnitary& u, const Tolerances& tol) {
    KeyDistinguishability k;
    double largest = 0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            k.gram[2 * i + j] = u(i, j);
            largest = std::max(largest, std::abs(u(i, j)));
        }
    }
    k.distinguishable = largest <= tol.vanishing;
    return k;
}

KeyReuseFeasibility key_reuse_feasibility(const TaggingUnitary& u, const Tolerances& tol) {
    KeyReuseFeasibility f;
    for (int i = 0; i < 2; ++i) {
        f.diagonal[i] = std::abs(u(i, i));
        if (!f.witness && f.diagonal[i] > tol.vanishing) {
            f.witness = i;
        }
    }
    f.ruled_out = f.witness.has_value();
    return f;
}

// ---------------------------------------------------------------------------
// Key reuse simulation.
// ---------------------------------------------------------------------------

KeyReuseAttackSpec KeyReuseAttackSpec::qubit() {
    KeyReuseAttackSpec s;
    s.ancilla = ComplexMatrix::basis_vector(2, 0);
    s.ancilla_perp = ComplexMatrix::basis_vector(2, 1);
    return s;
}

void KeyReuseAttackSpec::validate(const Tolerances& tol) const {
    if (ancilla.cols() != 1 || ancilla_perp.cols() != 1 || ancilla.size() != ancilla_perp.size() ||
        ancilla.size() < 2) {
        throw std::invalid_argument("ancilla states must be column vectors of equal dimension >= 2");
    }
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1) > tol.normalization) {
        throw std::invalid_argument("|alpha|^2 + |beta|^2 must be 1");
    }
    if (std::abs(norm(ancilla) - 1) > tol.normalization || std::abs(norm(ancilla_perp) - 1) > tol.normalization ||
        std::abs(inner(ancilla, ancilla_perp)) > tol.normalization) {
        throw std::invalid_argument("ancilla states must be orthonormal");
    }
}

ComplexMatrix KeyReuseAttackSpec::target_state() const {
    const std::size_t d = ancilla_dim();
    ComplexMatrix t(kKeyDim * d, 1);
    for (std::size_t x = 0; x < d; ++x) {
        t[1 * d + x] = alpha * ancilla[x];         // |01>
        t[2 * d + x] = -beta * ancilla_perp[x];    // |10>
    }
    return t;
}

nlohmann::json to_json(const KeyReuseStats& s) {
    return {
        {"acceptance_per_round", s.acceptance_per_round},
        {"decode_accuracy_per_round", s.decode_accuracy_per_round},
        {"key_fidelity_per_round", s.key_fidelity_per_round},
        {"trials", s.trials},
        {"surviving", s.surviving},
        {"mean_key_fidelity", s.mean_key_fidelity},
        {"mean_target_fidelity", s.mean_target_fidelity},
        {"forgery_frequency", s.forgery_frequency},
        {"forgery_probability", s.forgery_probability},
    };
}

ComplexMatrix no_interaction(std::size_t ancilla_dim) {
    return ComplexMatrix::identity(kMessageDim * ancilla_dim);
}

ComplexMatrix subspace_marking_interaction(const KeyReuseAttackSpec& spec) {
    spec.validate();
    const std::size_t d = spec.ancilla_dim();
    const ComplexMatrix id = ComplexMatrix::identity(d);
    const ComplexMatrix flip = id - outer(spec.ancilla) - outer(spec.ancilla_perp) +
                               spec.ancilla_perp * spec.ancilla.adjoint() + spec.ancilla * spec.ancilla_perp.adjoint();
    const ComplexMatrix p = accept_projector();
    return tensor(p, id) + tensor(ComplexMatrix::identity(kMessageDim) - p, flip);
}

namespace {

// Pure state of A x B x E x ancilla with index ((2a + b) * 4 + e) * d + x.
class ReuseSimulator {
   public:
    ReuseSimulator(const TaggingUnitary& u, const KeyReuseConfig& cfg)
        : d_(cfg.spec.ancilla_dim()),
          u_(u.matrix()),
          ud_(u.matrix().adjoint()),
          interaction_(cfg.interaction),
          forge_(forge_operator(u, cfg.spec)),
          full_(kJointDim * d_),
          tmp_(kMessageDim * d_) {}

    std::size_t block() const { return kMessageDim * d_; }

    // key_ancilla (A x B x ancilla) with message |phi_bit> inserted.
    void load(const std::vector<Complex>& key_ancilla, int bit) {
        std::fill(full_.begin(), full_.end(), Complex{});
        for (std::size_t ab = 0; ab < kKeyDim; ++ab) {
            for (std::size_t x = 0; x < d_; ++x) {
                full_[(ab * kMessageDim + bit) * d_ + x] = key_ancilla[ab * d_ + x];
            }
        }
    }

    // Applies a 4x4 operator to E in the key branches with (2a + b) in `branches`.
    void apply_message_op(const ComplexMatrix& op, std::initializer_list<std::size_t> branches) {
        for (std::size_t ab : branches) {
            for (std::size_t x = 0; x < d_; ++x) {
                Complex in[kMessageDim];
                for (std::size_t e = 0; e < kMessageDim; ++e) {
                    in[e] = full_[(ab * kMessageDim + e) * d_ + x];
                }
                for (std::size_t r = 0; r < kMessageDim; ++r) {
                    Complex acc = 0;
                    for (std::size_t c = 0; c < kMessageDim; ++c) {
                        acc += op(r, c) * in[c];
                    }
                    full_[(ab * kMessageDim + r) * d_ + x] = acc;
                }
            }
        }
    }

    // Applies a (4d)x(4d) operator to message x ancilla in every key branch.
    void apply_channel_op(const ComplexMatrix& op) {
        const std::size_t n = block();
        for (std::size_t ab = 0; ab < kKeyDim; ++ab) {
            const Complex* in = &full_[ab * n];
            for (std::size_t r = 0; r < n; ++r) {
                Complex acc = 0;
                for (std::size_t c = 0; c < n; ++c) {
                    acc += op(r, c) * in[c];
                }
                tmp_[r] = acc;
            }
            std::copy(tmp_.begin(), tmp_.end(), full_.begin() + ab * n);
        }
    }

    void encode() { apply_message_op(u_, {2, 3}); }  // a = 1
    void decode() { apply_message_op(ud_, {0, 2}); }  // b = 0
    void interact() { apply_channel_op(interaction_); }
    void forge() { apply_channel_op(forge_); }

    std::array<double, kMessageDim> outcome_probabilities() const {
        std::array<double, kMessageDim> p{};
        for (std::size_t i = 0; i < full_.size(); ++i) {
            p[(i / d_) % kMessageDim] += std::norm(full_[i]);
        }
        return p;
    }

    // Collapses E onto outcome k and returns the renormalized key x ancilla state.
    std::vector<Complex> collapse(int k, double pk) const {
        std::vector<Complex> ka(kKeyDim * d_);
        const double s = 1 / std::sqrt(pk);
        for (std::size_t ab = 0; ab < kKeyDim; ++ab) {
            for (std::size_t x = 0; x < d_; ++x) {
                ka[ab * d_ + x] = full_[(ab * kMessageDim + k) * d_ + x] * s;
            }
        }
        return ka;
    }

    // Eve's control: U on the message when her ancilla is |a_perp>.
    static ComplexMatrix forge_operator(const TaggingUnitary& u, const KeyReuseAttackSpec& spec) {
        const ComplexMatrix perp = outer(spec.ancilla_perp);
        const ComplexMatrix rest = ComplexMatrix::identity(spec.ancilla_dim()) - perp;
        return tensor(ComplexMatrix::identity(kMessageDim), rest) + tensor(u.matrix(), perp);
    }

   private:
    std::size_t d_;
    ComplexMatrix u_;
    ComplexMatrix ud_;
    ComplexMatrix interaction_;
    ComplexMatrix forge_;
    std::vector<Complex> full_;
    std::vector<Complex> tmp_;
};

int sample_outcome(const std::array<double, kMessageDim>& p, Rng& rng) {
    const double x = uniform01(rng) * (p[0] + p[1] + p[2] + p[3]);
    double cum = 0;
    int k = 0;
    for (; k < static_cast<int>(kMessageDim) - 1; ++k) {
        cum += p[k];
        if (x < cum) {
            break;
        }
    }
    while (p[k] == 0 && k > 0) {
        --k;
    }
    return k;
}

double singlet_fidelity(const std::vector<Complex>& ka, std::size_t d) {
    const ComplexMatrix s = make_singlet();
    double f = 0;
    for (std::size_t x = 0; x < d; ++x) {
        Complex o = 0;
        for (std::size_t ab = 0; ab < kKeyDim; ++ab) {
            o += std::conj(s[ab]) * ka[ab * d + x];
        }
        f += std::norm(o);
    }
    return f;
}

}  // namespace

double reuse_forgery_probability(const TaggingUnitary& u, const KeyReuseAttackSpec& spec,
                                 const ComplexMatrix& key_ancilla, int forged_bit) {
    require_bit(forged_bit);
    spec.validate();
    if (key_ancilla.size() != kKeyDim * spec.ancilla_dim()) {
        throw std::invalid_argument("key x ancilla state has the wrong dimension");
    }
    KeyReuseConfig cfg;
    cfg.spec = spec;
    cfg.interaction = no_interaction(spec.ancilla_dim());
    ReuseSimulator sim(u, cfg);
    sim.load(std::vector<Complex>(key_ancilla.data().begin(), key_ancilla.data().end()), forged_bit);
    sim.forge();
    sim.decode();
    return std::min(1.0, sim.outcome_probabilities()[forged_bit]);
}

namespace {

// Key x ancilla state reached after a given (bit, outcome) history, with its
// per-bit round results and the reuse-round forgery probability filled lazily.
struct HistoryNode {
    std::vector<Complex> key_ancilla;
    std::array<std::optional<std::array<double, kMessageDim>>, 2> outcomes;
    std::optional<double> forgery;
    double key_fidelity = 0;
    double target_fidelity = 0;
};

}  // namespace

KeyReuseStats simulate_key_reuse(const TaggingUnitary& u, const KeyReuseConfig& config, Rng& rng,
                                 const Tolerances& tol) {
    if (config.rounds < 1) {
        throw std::invalid_argument("key reuse simulation needs at least one round");
    }
    require_bit(config.forged_bit);
    config.spec.validate(tol);
    const std::size_t d = config.spec.ancilla_dim();
    if (config.interaction.rows() != kMessageDim * d || config.interaction.cols() != kMessageDim * d) {
        throw std::invalid_argument("interaction must act on message x ancilla (" + std::to_string(kMessageDim * d) +
                                    " dimensions)");
    }
    const auto check = is_unitary(config.interaction, tol.unitarity);
    if (!check.unitary) {
        throw std::invalid_argument("Eve's interaction is not unitary (deviation " + format_deviation(check.deviation) +
                                    ")");
    }
    const ComplexMatrix initial = config.ancilla_initial.empty() ? config.spec.ancilla : config.ancilla_initial;
    if (initial.size() != d || std::abs(norm(initial) - 1) > tol.normalization) {
        throw std::invalid_argument("initial ancilla must be a normalized vector of the ancilla dimension");
    }
    const ComplexMatrix target = config.spec.target_state();
    ReuseSimulator sim(u, config);

    std::map<std::vector<std::uint8_t>, HistoryNode> nodes;
    auto make_node = [&](std::vector<Complex> ka) {
        HistoryNode n;
        n.key_fidelity = singlet_fidelity(ka, d);
        Complex overlap = 0;
        for (std::size_t i = 0; i < ka.size(); ++i) {
            overlap += std::conj(target[i]) * ka[i];
        }
        n.target_fidelity = std::norm(overlap);
        n.key_ancilla = std::move(ka);
        return n;
    };
    const ComplexMatrix start = tensor(make_singlet(), initial);
    nodes.emplace(std::vector<std::uint8_t>{}, make_node({start.data().begin(), start.data().end()}));

    KeyReuseStats stats;
    stats.trials = config.trials;
    const auto rounds = static_cast<std::size_t>(config.rounds);
    std::vector<std::uint64_t> alive(rounds, 0);
    std::vector<std::uint64_t> passed(rounds, 0);
    std::vector<std::uint64_t> correct(rounds, 0);
    std::vector<double> fidelity(rounds, 0);
    std::uint64_t forged = 0;
    double target_sum = 0;
    double forge_prob_sum = 0;

    std::vector<std::uint8_t> history;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
        history.clear();
        HistoryNode* node = &nodes.at(history);
        bool kept = true;
        for (std::size_t r = 0; r < rounds && kept; ++r) {
            ++alive[r];
            const int bit = uniform01(rng) < 0.5 ? 0 : 1;
            auto& cached = node->outcomes[bit];
            if (!cached) {
                sim.load(node->key_ancilla, bit);
                sim.encode();
                sim.interact();
                sim.decode();
                cached = sim.outcome_probabilities();
            }
            const auto p = *cached;
            const int k = sample_outcome(p, rng);
            kept = k <= 1;
            if (!kept) {
                break;
            }
            ++passed[r];
            correct[r] += k == bit;
            history.push_back(static_cast<std::uint8_t>(bit));
            history.push_back(static_cast<std::uint8_t>(k));
            auto it = nodes.find(history);
            if (it == nodes.end()) {
                sim.load(node->key_ancilla, bit);
                sim.encode();
                sim.interact();
                sim.decode();
                it = nodes.emplace(history, make_node(sim.collapse(k, p[k]))).first;
            }
            node = &it->second;
            fidelity[r] += node->key_fidelity;
        }
        if (!kept) {
            continue;
        }
        ++stats.surviving;
        target_sum += node->target_fidelity;
        if (!node->forgery) {
            sim.load(node->key_ancilla, config.forged_bit);
            sim.forge();
            sim.decode();
            node->forgery = std::min(1.0, sim.outcome_probabilities()[config.forged_bit]);
        }
        forge_prob_sum += *node->forgery;
        forged += uniform01(rng) < *node->forgery;
    }

    for (std::size_t r = 0; r < rounds; ++r) {
        const double n = static_cast<double>(alive[r]);
        stats.acceptance_per_round.push_back(alive[r] == 0 ? 0.0 : passed[r] / n);
        stats.decode_accuracy_per_round.push_back(alive[r] == 0 ? 0.0 : correct[r] / n);
        stats.key_fidelity_per_round.push_back(passed[r] == 0 ? 0.0 : fidelity[r] / passed[r]);
    }
    if (stats.surviving > 0) {
        const double n = static_cast<double>(stats.surviving);
        stats.mean_key_fidelity = stats.key_fidelity_per_round.back();
        stats.mean_target_fidelity = target_sum / n;
        stats.forgery_frequency = forged / n;
        stats.forgery_probability = forge_prob_sum / n;
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Monte Carlo cross-checks.
// ---------------------------------------------------------------------------

Frequency simulate_no_message(const TaggingUnitary& u, const ComplexMatrix& eve, std::uint64_t trials, Rng& rng) {
    const JointState received = decode(u, JointState::product(make_singlet(), eve));
    Frequency f;
    f.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        f.hits += bob_measure(received, rng).accepted;
    }
    return f;
}

Frequency simulate_message_attack(const TaggingUnitary& u, const ComplexMatrix& v, const Priors& priors,
                                  std::uint64_t trials, Rng& rng) {
    priors.validate();
    std::array<JointState, 2> received{
        decode(u, apply_on_message(v, encode(u, 0))),
        decode(u, apply_on_message(v, encode(u, 1))),
    };
    Frequency f;
    f.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const int bit = uniform01(rng) < priors.p0 ? 0 : 1;
        const auto m = bob_measure(received[bit], rng);
        f.hits += m.accepted && m.outcome == 1 - bit;
    }
    return f;
}

}  // namespace qmac
