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

#include "qmac/linalg.h"

#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gtest/gtest.h"
#include "qmac/protocol.h"

using namespace qmac;

namespace {

ComplexMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    std::normal_distribution<double> n;
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = {n(rng), n(rng)};
    }
    return m;
}

ComplexMatrix random_density(std::size_t dim, Rng& rng) {
    auto a = random_matrix(dim, dim, rng);
    auto rho = a * a.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho;
}

// Largest eigenvalue of a positive semidefinite matrix by power iteration.
double power_iteration_lambda_max(const ComplexMatrix& h, int iterations) {
    ComplexMatrix v(h.rows(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = Complex(1.0 + 0.1 * i, 0.05 * i);
    }
    double lambda = 0;
    for (int it = 0; it < iterations; ++it) {
        ComplexMatrix w = h * v;
        lambda = norm(w) / norm(v);
        v = w * Complex(1 / norm(w));
    }
    return inner(v, h * v).real();
}

const ComplexMatrix kSigmaX{{0, 1}, {1, 0}};

}  // namespace

TEST(tensor, identity_and_basis_permutation) {
    EXPECT_EQ(tensor(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
    const auto x_on_first = tensor(kSigmaX, ComplexMatrix::identity(2));
    EXPECT_EQ(x_on_first * ComplexMatrix::basis_vector(4, 0), ComplexMatrix::basis_vector(4, 2));
}

TEST(tensor, singlet_with_message_index_convention) {
    // Singlet amplitudes sit on |01> (index 1) and |10> (index 2); with a
    // 4-dim message in e_0 these land at 1*4 + 0 = 4 and 2*4 + 0 = 8.
    const auto v = tensor(make_singlet(), ComplexMatrix::basis_vector(4, 0));
    ASSERT_EQ(v.rows(), 16u);
    for (std::size_t i = 0; i < 16; ++i) {
        const double expect = i == 4 ? 1 / std::sqrt(2.0) : i == 8 ? -1 / std::sqrt(2.0) : 0.0;
        EXPECT_DOUBLE_EQ(v[i].real(), expect) << i;
        EXPECT_EQ(v[i].imag(), 0.0);
    }
}

TEST(tensor, associative) {
    Rng rng = make_rng(3);
    std::uniform_int_distribution<int> small(-9, 9);
    auto gaussian_integers = [&](std::size_t r, std::size_t c) {
        ComplexMatrix m(r, c);
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = {static_cast<double>(small(rng)), static_cast<double>(small(rng))};
        }
        return m;
    };
    for (int k = 0; k < 20; ++k) {
        // Integer entries: every product is exact, so the two groupings agree bit for bit.
        const auto a = gaussian_integers(2, 1 + k % 2);
        const auto b = gaussian_integers(1 + k % 3, 2);
        const auto c = gaussian_integers(2, 2);
        EXPECT_EQ(tensor(tensor(a, b), c), tensor(a, tensor(b, c)));
        // General floats: equal up to rounding.
        const auto x = random_matrix(2, 2, rng);
        const auto y = random_matrix(2, 1, rng);
        const auto z = random_matrix(1, 2, rng);
        EXPECT_LE(max_abs_diff(tensor(tensor(x, y), z), tensor(x, tensor(y, z))), 1e-13);
    }
}

TEST(partial_trace, singlet_marginal_is_maximally_mixed) {
    const std::array<std::size_t, 2> dims{2, 2};
    for (std::size_t keep : {0u, 1u}) {
        const std::array<std::size_t, 1> k{keep};
        const auto r = partial_trace(outer(make_singlet()), dims, k);
        EXPECT_LE(max_abs_diff(r, Complex(0.5) * ComplexMatrix::identity(2)), 1e-15);
    }
}

TEST(partial_trace, recovers_product_factors) {
    Rng rng = make_rng(5);
    for (int k = 0; k < 30; ++k) {
        const std::size_t da = 2 + k % 3;
        const std::size_t db = 2 + (k / 3) % 3;
        const auto ra = random_density(da, rng);
        const auto rb = random_density(db, rng);
        const auto rho = tensor(ra, rb);
        const std::array<std::size_t, 2> dims{da, db};
        const std::array<std::size_t, 1> keep_a{0};
        const std::array<std::size_t, 1> keep_b{1};
        EXPECT_LE(max_abs_diff(partial_trace(rho, dims, keep_a), ra), 1e-12);
        EXPECT_LE(max_abs_diff(partial_trace(rho, dims, keep_b), rb), 1e-12);
    }
}

TEST(partial_trace, three_parties_and_trace_preservation) {
    Rng rng = make_rng(6);
    const auto ra = random_density(2, rng);
    const auto rb = random_density(3, rng);
    const auto rc = random_density(2, rng);
    const auto rho = tensor(ra, tensor(rb, rc));
    const std::array<std::size_t, 3> dims{2, 3, 2};
    const std::array<std::size_t, 2> keep{2, 0};  // order in `keep` does not matter
    EXPECT_LE(max_abs_diff(partial_trace(rho, dims, keep), tensor(ra, rc)), 1e-12);
    const std::array<std::size_t, 0> none{};
    EXPECT_NEAR(partial_trace(rho, dims, none)(0, 0).real(), 1.0, 1e-12);
}

TEST(partial_trace, errors) {
    const auto rho = ComplexMatrix::identity(4);
    const std::array<std::size_t, 2> bad_dims{2, 3};
    const std::array<std::size_t, 1> keep{0};
    EXPECT_THROW(partial_trace(rho, bad_dims, keep), std::invalid_argument);
    const std::array<std::size_t, 2> dims{2, 2};
    const std::array<std::size_t, 1> out_of_range{2};
    EXPECT_THROW(partial_trace(rho, dims, out_of_range), std::invalid_argument);
    ComplexMatrix skew = rho;
    skew(0, 1) = 1.0;
    EXPECT_THROW(partial_trace(skew, dims, keep), std::invalid_argument);
}

TEST(eig_hermitian, diagonal_and_identity) {
    const std::array<Complex, 4> diag{2, 2, 0, 0};
    const auto e = eig_hermitian(ComplexMatrix::diagonal(diag));
    EXPECT_EQ(e.eigenvalues, (std::vector<double>{0, 0, 2, 2}));
    const auto id = eig_hermitian(ComplexMatrix::identity(4));
    for (double l : id.eigenvalues) {
        EXPECT_EQ(l, 1.0);
    }
}

TEST(eig_hermitian, rejects_non_hermitian) {
    ComplexMatrix m{{1, 2}, {0, 1}};
    EXPECT_THROW(eig_hermitian(m), std::invalid_argument);
}

TEST(eig_hermitian, worked_example_q_matches_power_iteration) {
    const auto u = TaggingUnitary::worked_example();
    const auto p = accept_projector();
    const auto q = u.matrix() * p * u.matrix().adjoint() + p;
    const double oracle = power_iteration_lambda_max(q, 400);
    const auto e = eig_hermitian(q);
    EXPECT_NEAR(e.eigenvalues.back(), oracle, 1e-12);
    // Sum of two rank-2 projectors: top eigenvalue is 1 + largest singular value of M0 = 1 + 1/sqrt2.
    EXPECT_NEAR(e.eigenvalues.back(), 1 + 1 / std::sqrt(2.0), 1e-12);
}

TEST(eig_hermitian, reconstruction_and_orthonormality_property) {
    Rng rng = make_rng(7);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + k % 16;
        const auto a = random_matrix(n, n, rng);
        const auto h = a + a.adjoint();
        const auto e = eig_hermitian(h);
        ASSERT_TRUE(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
        std::vector<Complex> lam(e.eigenvalues.begin(), e.eigenvalues.end());
        const auto& v = e.eigenvectors;
        EXPECT_LE(max_abs_diff(v * ComplexMatrix::diagonal(lam) * v.adjoint(), h), 1e-9);
        EXPECT_LE(max_abs_diff(v.adjoint() * v, ComplexMatrix::identity(n)), 1e-10);
        EXPECT_LE(max_abs_diff(h * v, v * ComplexMatrix::diagonal(lam)), 1e-10 * std::max(1.0, h.max_abs()));
        const double sum = std::accumulate(e.eigenvalues.begin(), e.eigenvalues.end(), 0.0);
        EXPECT_NEAR(sum, h.trace().real(), 1e-9);
        EXPECT_LE(e.sweeps, 100);
    }
}

TEST(is_unitary, cases) {
    const auto id = is_unitary(ComplexMatrix::identity(4), 1e-12);
    EXPECT_TRUE(id.unitary);
    EXPECT_EQ(id.deviation, 0.0);
    const std::array<Complex, 4> d{1, 1, 1, 2};
    const auto bad = is_unitary(ComplexMatrix::diagonal(d), 1e-12);
    EXPECT_FALSE(bad.unitary);
    EXPECT_DOUBLE_EQ(bad.deviation, 3.0);
    EXPECT_FALSE(is_unitary(ComplexMatrix(2, 3), 1e-12).unitary);
}

TEST(haar_random_unitary, unitary_and_deterministic) {
    Rng a = make_rng(42);
    Rng b = make_rng(42);
    for (std::size_t dim = 1; dim <= 16; ++dim) {
        const auto u = haar_random_unitary(dim, a);
        EXPECT_TRUE(is_unitary(u, 1e-10).unitary) << dim;
        EXPECT_EQ(u, haar_random_unitary(dim, b));
    }
    Rng c = make_rng(1);
    const auto scalar = haar_random_unitary(1, c);
    EXPECT_NEAR(std::abs(scalar(0, 0)), 1.0, 1e-15);
}

TEST(haar_random_unitary, second_moment_matches_haar) {
    // For Haar U in dimension d, |U_00|^2 ~ Beta(1, d - 1): mean 1/d, variance (d-1)/(d^2 (d+1)).
    Rng rng = make_rng(2024);
    const int n = 10000;
    double sum = 0;
    for (int k = 0; k < n; ++k) {
        sum += std::norm(haar_random_unitary(4, rng)(0, 0));
    }
    const double sigma = std::sqrt(3.0 / 80.0 / n);
    EXPECT_NEAR(sum / n, 0.25, 3 * sigma);
}

TEST(haar_random_unitary, left_invariance_fourth_moment) {
    // E|U_00|^4 = 2 / (d (d + 1)) = 0.1 at d = 4, and W U is again Haar for fixed W.
    Rng rng = make_rng(77);
    Rng wrng = make_rng(78);
    const auto w = haar_random_unitary(4, wrng);
    const int n = 10000;
    double plain = 0;
    double shifted = 0;
    for (int k = 0; k < n; ++k) {
        const auto u = haar_random_unitary(4, rng);
        plain += std::pow(std::norm(u(0, 0)), 2);
        shifted += std::pow(std::norm((w * u)(0, 0)), 2);
    }
    const double sigma = std::sqrt((24.0 / 840.0 - 0.01) / n);
    EXPECT_NEAR(plain / n, 0.1, 3 * sigma);
    EXPECT_NEAR(shifted / n, 0.1, 3 * sigma);
}

TEST(haar_random_unitary, conjugation_preserves_trace) {
    Rng rng = make_rng(9);
    for (int k = 0; k < 100; ++k) {
        const auto u = haar_random_unitary(4, rng);
        const auto rho = random_density(4, rng);
        EXPECT_NEAR((u * rho * u.adjoint()).trace().real(), 1.0, 1e-12);
    }
}

TEST(expi_hermitian, matches_closed_form_and_is_unitary) {
    const double t = 0.7;
    const auto v = expi_hermitian(Complex(t) * kSigmaX);
    const ComplexMatrix expect{{std::cos(t), Complex(0, std::sin(t))}, {Complex(0, std::sin(t)), std::cos(t)}};
    EXPECT_LE(max_abs_diff(v, expect), 1e-14);
    Rng rng = make_rng(10);
    for (int k = 0; k < 50; ++k) {
        const auto a = random_matrix(4, 4, rng);
        EXPECT_TRUE(is_unitary(expi_hermitian(a + a.adjoint()), 1e-12).unitary);
    }
}

TEST(nearest_unitary, fixes_perturbed_unitaries) {
    Rng rng = make_rng(12);
    for (int k = 0; k < 20; ++k) {
        const auto u = haar_random_unitary(4, rng);
        auto w = u;
        w(0, 0) += 1e-4;
        const auto fixed = nearest_unitary(w);
        EXPECT_TRUE(is_unitary(fixed, 1e-12).unitary);
        EXPECT_LE(max_abs_diff(fixed, u), 1e-3);
        EXPECT_LE(max_abs_diff(nearest_unitary(u), u), 1e-12);
    }
    EXPECT_THROW(nearest_unitary(ComplexMatrix(2, 2)), std::invalid_argument);
}
