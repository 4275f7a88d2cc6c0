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

#include "qmac/protocol.h"

#include <cmath>
#include <stdexcept>

#include "qmac/linalg.h"

namespace qmac {

void require_bit(int bit) {
    if (bit != 0 && bit != 1) {
        throw std::invalid_argument("message bit must be 0 or 1, got " + std::to_string(bit));
    }
}

MessageBasis MessageBasis::computational() {
    return MessageBasis(ComplexMatrix::identity(kMessageDim));
}

MessageBasis MessageBasis::from_columns(ComplexMatrix columns, const Tolerances& tol) {
    if (columns.rows() != kMessageDim || columns.cols() != kMessageDim) {
        throw std::invalid_argument("MessageBasis: expected four 4-dimensional columns");
    }
    const auto check = is_unitary(columns, tol.normalization);
    if (!check.unitary) {
        throw std::invalid_argument(
            "MessageBasis: columns are not orthonormal (deviation " + format_deviation(check.deviation) + ")");
    }
    return MessageBasis(std::move(columns));
}

TaggingUnitary::TaggingUnitary(ComplexMatrix u, const Tolerances& tol) : u_(std::move(u)) {
    if (u_.rows() != kMessageDim || u_.cols() != kMessageDim) {
        throw std::invalid_argument(
            "tagging unitary must be 4x4, got " + std::to_string(u_.rows()) + "x" + std::to_string(u_.cols()));
    }
    const auto check = is_unitary(u_, tol.unitarity);
    deviation_ = check.deviation;
    if (!check.unitary) {
        throw std::invalid_argument(
            "tagging operation is not unitary (||U^dag U - I||_max = " + format_deviation(check.deviation) + ")");
    }
}

TaggingUnitary TaggingUnitary::in_basis(const ComplexMatrix& lab_u, const MessageBasis& basis, const Tolerances& tol) {
    return TaggingUnitary(basis.columns().adjoint() * lab_u * basis.columns(), tol);
}

TaggingUnitary TaggingUnitary::identity() {
    return TaggingUnitary(ComplexMatrix::identity(kMessageDim));
}

TaggingUnitary TaggingUnitary::x_block() {
    ComplexMatrix u(kMessageDim, kMessageDim);
    u(0, 2) = u(1, 3) = u(2, 0) = u(3, 1) = 1.0;
    return TaggingUnitary(std::move(u));
}

TaggingUnitary TaggingUnitary::worked_example() {
    const double h = 0.5;
    const double r2 = 1 / std::sqrt(2.0);
    std::vector<ComplexMatrix> rows;
    rows.push_back(ComplexMatrix{{h, h, h, h}});
    rows.push_back(ComplexMatrix{{0, 0, r2, -r2}});
    for (std::size_t seed = 0; rows.size() < kMessageDim; ++seed) {
        ComplexMatrix v = ComplexMatrix::basis_vector(kMessageDim, seed).transpose();
        for (const auto& r : rows) {
            // Row vectors: remove the component along r.
            Complex c = 0;
            for (std::size_t k = 0; k < kMessageDim; ++k) {
                c += std::conj(r[k]) * v[k];
            }
            v -= c * r;
        }
        const double n = norm(v);
        if (n > 1e-6) {
            rows.push_back(v * Complex(1 / n));
        }
    }
    ComplexMatrix u(kMessageDim, kMessageDim);
    for (std::size_t i = 0; i < kMessageDim; ++i) {
        u.set_block(i, 0, rows[i]);
    }
    return TaggingUnitary(std::move(u));
}

ComplexMatrix TaggingUnitary::block(std::size_t i) const {
    if (i > 3) {
        throw std::invalid_argument("block index must be 0..3");
    }
    return u_.block(2 * (i / 2), 2 * (i % 2), 2, 2);
}

ComplexMatrix TaggingUnitary::block_row(std::size_t i, std::size_t j) const {
    return block(i).row(j);
}

ComplexMatrix TaggingUnitary::block_column(std::size_t i, std::size_t j) const {
    return block(i).col(j);
}

JointState::JointState(ComplexMatrix amplitudes, const Tolerances& tol) : amps_(std::move(amplitudes)) {
    if (amps_.rows() != kJointDim || amps_.cols() != 1) {
        throw std::invalid_argument("JointState: expected a 16-dimensional column vector");
    }
    const double n = norm(amps_);
    if (std::abs(n * n - 1) > tol.normalization) {
        throw std::invalid_argument("JointState: state is not normalized (norm^2 = " + format_deviation(n * n) + ")");
    }
}

JointState JointState::product(const ComplexMatrix& key, const ComplexMatrix& message, const Tolerances& tol) {
    return JointState(tensor(key, message), tol);
}

ComplexMatrix JointState::message_density() const {
    static constexpr std::array<std::size_t, 3> dims{2, 2, kMessageDim};
    static constexpr std::array<std::size_t, 1> keep{2};
    return partial_trace(density(), dims, keep);
}

ComplexMatrix JointState::key_density() const {
    static constexpr std::array<std::size_t, 3> dims{2, 2, kMessageDim};
    static constexpr std::array<std::size_t, 2> keep{0, 1};
    return partial_trace(density(), dims, keep);
}

ComplexMatrix make_singlet() {
    const double r = 1 / std::sqrt(2.0);
    return ComplexMatrix{{0}, {r}, {-r}, {0}};
}

namespace {

ComplexMatrix projector(std::size_t dim, std::size_t i) {
    ComplexMatrix p(dim, dim);
    p(i, i) = 1.0;
    return p;
}

}  // namespace

ComplexMatrix encoding_operator(const TaggingUnitary& u) {
    const auto i2 = ComplexMatrix::identity(2);
    const auto i4 = ComplexMatrix::identity(kMessageDim);
    return tensor(projector(2, 0), tensor(i2, i4)) + tensor(projector(2, 1), tensor(i2, u.matrix()));
}

ComplexMatrix decoding_operator(const TaggingUnitary& u) {
    const auto i2 = ComplexMatrix::identity(2);
    const auto i4 = ComplexMatrix::identity(kMessageDim);
    const auto d_be = tensor(projector(2, 0), u.matrix().adjoint()) + tensor(projector(2, 1), i4);
    return tensor(i2, d_be);
}

JointState apply(const ComplexMatrix& op, const JointState& s) {
    return JointState(op * s.amplitudes());
}

JointState apply_on_message(const ComplexMatrix& op, const JointState& s) {
    if (op.rows() != kMessageDim || op.cols() != kMessageDim) {
        throw std::invalid_argument("apply_on_message: operator must be 4x4");
    }
    ComplexMatrix out(kJointDim, 1);
    for (std::size_t key = 0; key < kKeyDim; ++key) {
        for (std::size_t r = 0; r < kMessageDim; ++r) {
            Complex acc = 0;
            for (std::size_t c = 0; c < kMessageDim; ++c) {
                acc += op(r, c) * s.amplitudes()[key * kMessageDim + c];
            }
            out[key * kMessageDim + r] = acc;
        }
    }
    return JointState(std::move(out));
}

JointState encode(const TaggingUnitary& u, int bit) {
    require_bit(bit);
    const auto start = JointState::product(make_singlet(), ComplexMatrix::basis_vector(kMessageDim, bit));
    return encode(u, start);
}

JointState encode(const TaggingUnitary& u, const JointState& s) {
    return apply(encoding_operator(u), s);
}

JointState decode(const TaggingUnitary& u, const JointState& s) {
    return apply(decoding_operator(u), s);
}

ComplexMatrix channel_density(const TaggingUnitary& u, int bit) {
    require_bit(bit);
    const ComplexMatrix rho = outer(ComplexMatrix::basis_vector(kMessageDim, bit));
    return Complex(0.5) * (rho + u.matrix() * rho * u.matrix().adjoint());
}

ComplexMatrix accept_projector() {
    return projector(kMessageDim, 0) + projector(kMessageDim, 1);
}

double acceptance_probability(const ComplexMatrix& message_rho) {
    if (message_rho.rows() != kMessageDim || message_rho.cols() != kMessageDim) {
        throw std::invalid_argument("acceptance_probability: expected a 4x4 density operator");
    }
    return message_rho(0, 0).real() + message_rho(1, 1).real();
}

std::array<double, 4> outcome_probabilities(const JointState& s) {
    std::array<double, 4> p{};
    for (std::size_t i = 0; i < kJointDim; ++i) {
        p[i % kMessageDim] += std::norm(s.amplitudes()[i]);
    }
    return p;
}

Measurement bob_measure(const JointState& s, Rng& rng) {
    const auto p = outcome_probabilities(s);
    const double total = p[0] + p[1] + p[2] + p[3];
    const double x = uniform01(rng) * total;
    int outcome = 3;
    double cum = 0;
    for (int k = 0; k < 3; ++k) {
        cum += p[k];
        if (x < cum) {
            outcome = k;
            break;
        }
    }
    // Guard against landing on a zero-probability tail outcome through rounding.
    while (p[outcome] == 0) {
        --outcome;
    }
    ComplexMatrix post(kJointDim, 1);
    const double scale = 1 / std::sqrt(p[outcome]);
    for (std::size_t key = 0; key < kKeyDim; ++key) {
        const std::size_t i = key * kMessageDim + outcome;
        post[i] = s.amplitudes()[i] * scale;
    }
    return {outcome, outcome <= 1, JointState(std::move(post))};
}

double key_fidelity(const JointState& s) {
    const ComplexMatrix singlet = make_singlet();
    double f = 0;
    for (std::size_t e = 0; e < kMessageDim; ++e) {
        Complex overlap = 0;
        for (std::size_t key = 0; key < kKeyDim; ++key) {
            overlap += std::conj(singlet[key]) * s.amplitudes()[key * kMessageDim + e];
        }
        f += std::norm(overlap);
    }
    return std::min(1.0, f);
}

nlohmann::json to_json(const RunRecord& r) {
    return {
        {"message", r.message},
        {"outcome", r.outcome},
        {"accepted", r.accepted},
        {"decoded", r.decoded ? nlohmann::json(*r.decoded) : nlohmann::json(nullptr)},
        {"key_fidelity", r.key_fidelity},
    };
}

RunRecord make_record(int message, const Measurement& m) {
    RunRecord r;
    r.message = message;
    r.outcome = m.outcome;
    r.accepted = m.accepted;
    if (m.accepted) {
        r.decoded = m.outcome;
    }
    r.key_fidelity = key_fidelity(m.post);
    return r;
}

RunRecord run_honest(const TaggingUnitary& u, int bit, Rng& rng) {
    const JointState received = decode(u, encode(u, bit));
    return make_record(bit, bob_measure(received, rng));
}

ComplexMatrix classical_key_channel_density(const TaggingUnitary& u, int bit) {
    require_bit(bit);
    const ComplexMatrix phi = ComplexMatrix::basis_vector(kMessageDim, bit);
    ComplexMatrix rho = ComplexMatrix::zeros(kMessageDim, kMessageDim);
    for (int key = 0; key < 2; ++key) {
        const ComplexMatrix sent = key == 0 ? phi : u.matrix() * phi;
        rho += Complex(0.5) * outer(sent);
    }
    return rho;
}

RunRecord run_classical_key(const TaggingUnitary& u, int bit, Rng& rng) {
    require_bit(bit);
    const int key = uniform01(rng) < 0.5 ? 0 : 1;
    ComplexMatrix msg = ComplexMatrix::basis_vector(kMessageDim, bit);
    if (key == 1) {
        msg = u.matrix().adjoint() * (u.matrix() * msg);
    }
    // The key register carries no quantum state in this mode; park the message
    // next to a singlet so the common measurement path applies.
    const Measurement m = bob_measure(JointState::product(make_singlet(), msg), rng);
    return make_record(bit, m);
}

}  // namespace qmac
