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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qmac {

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ia = 0; ia < a.rows(); ++ia) {
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const Complex s = a(ia, ja);
            if (s == Complex{}) {
                continue;
            }
            for (std::size_t ib = 0; ib < b.rows(); ++ib) {
                for (std::size_t jb = 0; jb < b.cols(); ++jb) {
                    out(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
                }
            }
        }
    }
    return out;
}

double hermiticity_deviation(const ComplexMatrix& h) {
    if (!h.is_square()) {
        throw std::invalid_argument("hermiticity_deviation: matrix is not square");
    }
    double dev = 0;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        for (std::size_t j = i; j < h.cols(); ++j) {
            dev = std::max(dev, std::abs(h(i, j) - std::conj(h(j, i))));
        }
    }
    return dev;
}

ComplexMatrix partial_trace(
    const ComplexMatrix& rho, std::span<const std::size_t> dims, std::span<const std::size_t> keep,
    const Tolerances& tol) {
    if (!rho.is_square()) {
        throw std::invalid_argument("partial_trace: operator is not square");
    }
    const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    if (dims.empty() || total != rho.rows() || std::find(dims.begin(), dims.end(), 0) != dims.end()) {
        std::ostringstream msg;
        msg << "partial_trace: subsystem dimensions multiply to " << total << ", operator is " << rho.rows() << "x"
            << rho.cols();
        throw std::invalid_argument(msg.str());
    }
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size() || kept[k]) {
            throw std::invalid_argument("partial_trace: keep list has an invalid or repeated subsystem");
        }
        kept[k] = true;
    }
    const double herm = hermiticity_deviation(rho);
    if (herm > tol.hermiticity) {
        throw std::invalid_argument("partial_trace: operator is not Hermitian (deviation " + format_deviation(herm) + ")");
    }

    // Strides of each subsystem in the full index.
    std::vector<std::size_t> stride(dims.size());
    std::size_t s = 1;
    for (std::size_t k = dims.size(); k-- > 0;) {
        stride[k] = s;
        s *= dims[k];
    }
    std::vector<std::size_t> kept_axes;
    std::vector<std::size_t> traced_axes;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        (kept[k] ? kept_axes : traced_axes).push_back(k);
    }

    // Offset in the full index of a multi-index over `axes`, encoded as a flat number.
    auto offset = [&](const std::vector<std::size_t>& axes, std::size_t flat) {
        std::size_t off = 0;
        for (std::size_t n = axes.size(); n-- > 0;) {
            const std::size_t k = axes[n];
            off += (flat % dims[k]) * stride[k];
            flat /= dims[k];
        }
        return off;
    };
    std::size_t kept_dim = 1;
    for (std::size_t k : kept_axes) {
        kept_dim *= dims[k];
    }
    const std::size_t traced_dim = total / kept_dim;

    std::vector<std::size_t> kept_off(kept_dim);
    for (std::size_t i = 0; i < kept_dim; ++i) {
        kept_off[i] = offset(kept_axes, i);
    }
    std::vector<std::size_t> traced_off(traced_dim);
    for (std::size_t t = 0; t < traced_dim; ++t) {
        traced_off[t] = offset(traced_axes, t);
    }

    ComplexMatrix out(kept_dim, kept_dim);
    for (std::size_t i = 0; i < kept_dim; ++i) {
        for (std::size_t j = 0; j < kept_dim; ++j) {
            Complex acc = 0;
            for (std::size_t t = 0; t < traced_dim; ++t) {
                acc += rho(kept_off[i] + traced_off[t], kept_off[j] + traced_off[t]);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

HermitianEigen eig_hermitian(const ComplexMatrix& h, const Tolerances& tol) {
    const double herm = hermiticity_deviation(h);
    if (herm > tol.hermiticity) {
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian (deviation " + format_deviation(herm) + ")");
    }
    const std::size_t n = h.rows();
    ComplexMatrix a = h;
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex m = 0.5 * (h(i, j) + std::conj(h(j, i)));
            a(i, j) = m;
            a(j, i) = std::conj(m);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = std::max(1.0, a.frobenius_norm());

    auto off_norm = [&] {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) {
                    s += std::norm(a(i, j));
                }
            }
        }
        return std::sqrt(s);
    };

    int sweeps = 0;
    while (off_norm() > tol.jacobi_offdiag * scale && sweeps < tol.jacobi_max_sweeps) {
        ++sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = a(p, q);
                const double mag = std::abs(b);
                if (mag == 0) {
                    continue;
                }
                // Rotate the phase out of a(p, q), then apply a real symmetric rotation.
                const Complex phase_conj = std::conj(b) / mag;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1);
                const double s = t * c;
                const Complex gpp = c;
                const Complex gpq = s;
                const Complex gqp = -s * phase_conj;
                const Complex gqq = c * phase_conj;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0;
                a(q, p) = 0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });
    HermitianEigen out;
    out.sweeps = sweeps;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) {
            out.eigenvectors(r, k) = v(r, order[k]);
        }
    }
    return out;
}

UnitarityCheck is_unitary(const ComplexMatrix& u, double tol) {
    if (!u.is_square()) {
        return {false, std::numeric_limits<double>::infinity()};
    }
    const double dev = max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows()));
    return {dev <= tol, dev};
}

namespace {

Complex complex_gaussian(Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

}  // namespace

ComplexMatrix haar_random_unitary(std::size_t dim, Rng& rng) {
    if (dim == 0) {
        throw std::invalid_argument("haar_random_unitary: dimension must be positive");
    }
    ComplexMatrix q(dim, dim);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = complex_gaussian(rng);
    }
    // Modified Gram-Schmidt with one re-orthogonalization pass. The resulting
    // R has a positive real diagonal, which is what makes Q Haar distributed.
    for (std::size_t j = 0; j < dim; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex r = 0;
                for (std::size_t i = 0; i < dim; ++i) {
                    r += std::conj(q(i, k)) * q(i, j);
                }
                for (std::size_t i = 0; i < dim; ++i) {
                    q(i, j) -= r * q(i, k);
                }
            }
        }
        double nrm = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            nrm += std::norm(q(i, j));
        }
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < dim; ++i) {
            q(i, j) /= nrm;
        }
    }
    return q;
}

ComplexMatrix haar_random_state(std::size_t dim, Rng& rng) {
    if (dim == 0) {
        throw std::invalid_argument("haar_random_state: dimension must be positive");
    }
    ComplexMatrix v(dim, 1);
    for (std::size_t i = 0; i < dim; ++i) {
        v[i] = complex_gaussian(rng);
    }
    v *= 1.0 / norm(v);
    return v;
}

namespace {

ComplexMatrix spectral_map(const HermitianEigen& e, auto&& f) {
    const std::size_t n = e.eigenvalues.size();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex fk = f(e.eigenvalues[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const Complex vik = e.eigenvectors(i, k) * fk;
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += vik * std::conj(e.eigenvectors(j, k));
            }
        }
    }
    return out;
}

}  // namespace

ComplexMatrix expi_hermitian(const ComplexMatrix& h, const Tolerances& tol) {
    const HermitianEigen e = eig_hermitian(h, tol);
    return spectral_map(e, [](double x) { return std::polar(1.0, x); });
}

ComplexMatrix nearest_unitary(const ComplexMatrix& w, const Tolerances& tol) {
    const HermitianEigen e = eig_hermitian(w.adjoint() * w, tol);
    if (e.eigenvalues.front() <= 1e-24) {
        throw std::invalid_argument("nearest_unitary: matrix is singular");
    }
    return w * spectral_map(e, [](double x) { return Complex(1.0 / std::sqrt(x)); });
}

}  // namespace qmac
