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

#ifndef QMAC_PROTOCOL_H
#define QMAC_PROTOCOL_H

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"
#include "qmac/matrix.h"
#include "qmac/rng.h"
#include "qmac/tolerances.h"

namespace qmac {

// Joint register layout: key qubit A (2) x key qubit B (2) x message E (4),
// amplitude index 8a + 4b + e.
inline constexpr std::size_t kKeyDim = 4;
inline constexpr std::size_t kMessageDim = 4;
inline constexpr std::size_t kJointDim = kKeyDim * kMessageDim;

/// Throws std::invalid_argument unless bit is 0 or 1.
void require_bit(int bit);

/// Orthonormal message basis |phi_0>..|phi_3>, stored as matrix columns.
/// phi_0 and phi_1 carry the two messages; phi_2 and phi_3 are reject outcomes.
class MessageBasis {
   public:
    static MessageBasis computational();
    /// Throws std::invalid_argument unless the columns are orthonormal.
    static MessageBasis from_columns(ComplexMatrix columns, const Tolerances& tol = {});

    const ComplexMatrix& columns() const { return columns_; }
    ComplexMatrix state(std::size_t i) const { return columns_.col(i); }

   private:
    explicit MessageBasis(ComplexMatrix columns) : columns_(std::move(columns)) {}
    ComplexMatrix columns_;
};

/// The public tagging operation, expressed in the message basis.
///
/// Block notation: the matrix is [[M0, M1], [M2, M3]] with 2x2 blocks.
/// `block_row(i, j)` is row j of block i and `block_column(i, j)` column j.
class TaggingUnitary {
   public:
    /// Throws std::invalid_argument unless `u` is a 4x4 unitary within tol.unitarity.
    explicit TaggingUnitary(ComplexMatrix u, const Tolerances& tol = {});

    /// Re-expresses a lab-frame operator in `basis`: B^dag U B.
    static TaggingUnitary in_basis(const ComplexMatrix& lab_u, const MessageBasis& basis, const Tolerances& tol = {});

    static TaggingUnitary identity();
    /// Block-anti-diagonal swap phi_0 <-> phi_2, phi_1 <-> phi_3.
    static TaggingUnitary x_block();
    /// The completion of the worked example with first block rows (1/2, 1/2) and (0, 0):
    /// rows 0 and 1 are (1/2, 1/2, 1/2, 1/2) and (0, 0, 1/sqrt2, -1/sqrt2); rows 2 and 3
    /// are Gram-Schmidt of e_0, e_1 against them.
    static TaggingUnitary worked_example();

    const ComplexMatrix& matrix() const { return u_; }
    Complex operator()(std::size_t r, std::size_t c) const { return u_(r, c); }
    double unitarity_deviation() const { return deviation_; }

    ComplexMatrix block(std::size_t i) const;
    ComplexMatrix block_row(std::size_t i, std::size_t j) const;
    ComplexMatrix block_column(std::size_t i, std::size_t j) const;

   private:
    ComplexMatrix u_;
    double deviation_ = 0;
};

/// Normalized pure state of A x B x E.
class JointState {
   public:
    /// Throws std::invalid_argument unless 16 x 1 with unit norm within tol.normalization.
    explicit JointState(ComplexMatrix amplitudes, const Tolerances& tol = {});
    static JointState product(const ComplexMatrix& key, const ComplexMatrix& message, const Tolerances& tol = {});

    static constexpr std::size_t index(std::size_t a, std::size_t b, std::size_t e) { return 8 * a + 4 * b + e; }

    const ComplexMatrix& amplitudes() const { return amps_; }
    Complex amplitude(std::size_t a, std::size_t b, std::size_t e) const { return amps_[index(a, b, e)]; }

    ComplexMatrix density() const { return outer(amps_); }
    /// Reduced state of E.
    ComplexMatrix message_density() const;
    /// Reduced state of A x B.
    ComplexMatrix key_density() const;

   private:
    ComplexMatrix amps_;
};

/// (|01> - |10>) / sqrt2 on A x B.
ComplexMatrix make_singlet();

/// |0><0|_A (x) 1 + |1><1|_A (x) U acting on A x B x E.
ComplexMatrix encoding_operator(const TaggingUnitary& u);
/// 1_A (x) (|0><0|_B (x) U^dag + |1><1|_B (x) 1).
ComplexMatrix decoding_operator(const TaggingUnitary& u);

JointState apply(const ComplexMatrix& op, const JointState& s);
/// Applies a 4x4 operator to the message register only.
JointState apply_on_message(const ComplexMatrix& op, const JointState& s);

/// Alice's tagging of `bit` on the singlet key.
JointState encode(const TaggingUnitary& u, int bit);
/// Alice's tagging applied to an arbitrary joint state.
JointState encode(const TaggingUnitary& u, const JointState& s);
JointState decode(const TaggingUnitary& u, const JointState& s);

/// State of the message register in flight: (rho_i + U rho_i U^dag) / 2.
ComplexMatrix channel_density(const TaggingUnitary& u, int bit);

/// Accept projector P = |phi_0><phi_0| + |phi_1><phi_1|.
ComplexMatrix accept_projector();
/// Tr(rho P) for a 4x4 message density.
double acceptance_probability(const ComplexMatrix& message_rho);

std::array<double, 4> outcome_probabilities(const JointState& s);

struct Measurement {
    int outcome = 0;
    bool accepted = false;
    JointState post;
};

/// Projective measurement of E in the message basis, Born-rule sampled.
Measurement bob_measure(const JointState& s, Rng& rng);

/// <singlet| Tr_E |s><s| |singlet>.
double key_fidelity(const JointState& s);

struct RunRecord {
    int message = 0;
    int outcome = 0;
    bool accepted = false;
    std::optional<int> decoded;
    double key_fidelity = 0;
};

nlohmann::json to_json(const RunRecord& r);

/// Builds a record from a measurement on a run that carried `message`.
RunRecord make_record(int message, const Measurement& m);

/// Encode, decode, measure.
RunRecord run_honest(const TaggingUnitary& u, int bit, Rng& rng);

/// Degenerate key mode: a uniformly random classical key bit k selects whether
/// U is applied (Alice) and undone (Bob).
ComplexMatrix classical_key_channel_density(const TaggingUnitary& u, int bit);
RunRecord run_classical_key(const TaggingUnitary& u, int bit, Rng& rng);

}  // namespace qmac

#endif
