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

#ifndef QMAC_LINALG_H
#define QMAC_LINALG_H

#include <cstddef>
#include <span>
#include <vector>

#include "qmac/matrix.h"
#include "qmac/rng.h"
#include "qmac/tolerances.h"

namespace qmac {

/// Kronecker product. Entry (i_a * b.rows + i_b, j_a * b.cols + j_b) is a(i_a, j_a) * b(i_b, j_b).
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reduced operator on the subsystems listed in `keep` (any order; the result
/// keeps the original subsystem order). `dims` lists subsystem dimensions,
/// most significant first.
ComplexMatrix partial_trace(
    const ComplexMatrix& rho, std::span<const std::size_t> dims, std::span<const std::size_t> keep,
    const Tolerances& tol = {});

struct HermitianEigen {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // column k belongs to eigenvalues[k]
    int sweeps = 0;
};

/// Full spectrum of a Hermitian matrix by cyclic complex Jacobi rotations.
/// The input is symmetrized first; throws std::invalid_argument if it is
/// further than `tol.hermiticity` from Hermitian.
HermitianEigen eig_hermitian(const ComplexMatrix& h, const Tolerances& tol = {});

double hermiticity_deviation(const ComplexMatrix& h);

struct UnitarityCheck {
    bool unitary = false;
    double deviation = 0;  // ||U^dag U - I||_max
};

UnitarityCheck is_unitary(const ComplexMatrix& u, double tol);

/// Haar-distributed unitary: complex Gaussian matrix, QR by modified
/// Gram-Schmidt, R's diagonal made positive.
ComplexMatrix haar_random_unitary(std::size_t dim, Rng& rng);

/// Haar-distributed unit column vector.
ComplexMatrix haar_random_state(std::size_t dim, Rng& rng);

/// exp(i H) for Hermitian H, via the eigendecomposition.
ComplexMatrix expi_hermitian(const ComplexMatrix& h, const Tolerances& tol = {});

/// Unitary factor of the polar decomposition, W (W^dag W)^{-1/2}.
/// Throws std::invalid_argument if W is singular.
ComplexMatrix nearest_unitary(const ComplexMatrix& w, const Tolerances& tol = {});

}  // namespace qmac

#endif
