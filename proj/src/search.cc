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

#include "qmac/search.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>

#include "qmac/linalg.h"

namespace qmac {

namespace {

// Maps a chart coordinate to (kind, i, j): kind 0 diagonal, 1 symmetric, 2 antisymmetric.
struct GeneratorIndex {
    int kind;
    std::size_t i;
    std::size_t j;
};

GeneratorIndex generator_index(std::size_t n, std::size_t k) {
    if (k >= chart_dimension(n)) {
        throw std::invalid_argument("chart coordinate out of range");
    }
    if (k < n) {
        return {0, k, k};
    }
    std::size_t pair = (k - n) / 2;
    const int kind = 1 + static_cast<int>((k - n) % 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = n - 1 - i;
        if (pair < row) {
            return {kind, i, i + 1 + pair};
        }
        pair -= row;
    }
    throw std::logic_error("unreachable");
}

}  // namespace

std::size_t chart_dimension(std::size_t n) {
    return n * n;
}

ComplexMatrix chart_generator(std::size_t n, std::size_t k) {
    const auto g = generator_index(n, k);
    ComplexMatrix m(n, n);
    if (g.kind == 0) {
        m(g.i, g.i) = 1.0;
    } else if (g.kind == 1) {
        m(g.i, g.j) = m(g.j, g.i) = 1.0;
    } else {
        m(g.i, g.j) = Complex(0, -1);
        m(g.j, g.i) = Complex(0, 1);
    }
    return m;
}

ComplexMatrix chart_point(const ComplexMatrix& base, std::span<const double> params, const Tolerances& tol) {
    const std::size_t n = base.cols();
    if (params.size() != chart_dimension(n)) {
        throw std::invalid_argument("chart_point: wrong number of coordinates");
    }
    ComplexMatrix h(n, n);
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (params[k] != 0) {
            h += Complex(params[k]) * chart_generator(n, k);
        }
    }
    return base * expi_hermitian(h, tol);
}

ComplexMatrix chart_step(const ComplexMatrix& base, std::size_t k, double s) {
    const std::size_t n = base.cols();
    const auto g = generator_index(n, k);
    ComplexMatrix out = base;
    if (g.kind == 0) {
        const Complex ph = std::polar(1.0, s);
        for (std::size_t r = 0; r < base.rows(); ++r) {
            out(r, g.i) *= ph;
        }
        return out;
    }
    const double c = std::cos(s);
    const double sn = std::sin(s);
    // exp(i s X) = [[c, i sn], [i sn, c]];  exp(i s Y) = [[c, sn], [-sn, c]].
    const Complex r_ji = g.kind == 1 ? Complex(0, sn) : Complex(-sn);
    const Complex r_ij = g.kind == 1 ? Complex(0, sn) : Complex(sn);
    for (std::size_t r = 0; r < base.rows(); ++r) {
        const Complex vi = base(r, g.i);
        const Complex vj = base(r, g.j);
        out(r, g.i) = c * vi + vj * r_ji;
        out(r, g.j) = vi * r_ij + c * vj;
    }
    return out;
}

CoordinateSearchResult coordinate_search(const ComplexMatrix& start,
                                         const std::function<double(const ComplexMatrix&)>& objective,
                                         std::uint64_t max_evaluations, const Tolerances& tol) {
    if (max_evaluations == 0) {
        throw std::invalid_argument("coordinate_search: budget must be at least 1");
    }
    CoordinateSearchResult res;
    res.point = start;
    res.value = objective(start);
    res.evaluations = 1;
    res.trace.emplace_back(res.evaluations, res.value);

    const std::size_t dims = chart_dimension(start.cols());
    double step = tol.step_initial;
    while (step >= tol.step_floor && res.evaluations < max_evaluations) {
        bool improved = false;
        for (std::size_t k = 0; k < dims && res.evaluations < max_evaluations; ++k) {
            for (double sign : {1.0, -1.0}) {
                if (res.evaluations >= max_evaluations) {
                    break;
                }
                ComplexMatrix cand = chart_step(res.point, k, sign * step);
                const double v = objective(cand);
                ++res.evaluations;
                if (v > res.value) {
                    res.point = std::move(cand);
                    res.value = v;
                    res.trace.emplace_back(res.evaluations, res.value);
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            step *= tol.step_shrink;
        }
    }
    return res;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace qmac
