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

#ifndef QMAC_SEARCH_H
#define QMAC_SEARCH_H

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "qmac/matrix.h"
#include "qmac/tolerances.h"

namespace qmac {

// Hermitian generator chart of U(n): coordinates k < n are the diagonal units
// E_kk; the remaining n(n-1) coordinates come in pairs per (i < j), first
// E_ij + E_ji, then -i E_ij + i E_ji.

std::size_t chart_dimension(std::size_t n);
ComplexMatrix chart_generator(std::size_t n, std::size_t k);

/// base * exp(i sum_k params[k] G_k).
ComplexMatrix chart_point(const ComplexMatrix& base, std::span<const double> params, const Tolerances& tol = {});

/// base * exp(i s G_k) in closed form (only two columns of base change).
ComplexMatrix chart_step(const ComplexMatrix& base, std::size_t k, double s);

struct CoordinateSearchResult {
    ComplexMatrix point;
    double value = 0;
    std::uint64_t evaluations = 0;
    /// (evaluation count, value) after the start and after every accepted move.
    std::vector<std::pair<std::uint64_t, double>> trace;
};

/// Maximizes `objective` over the unitary group by coordinate moves of
/// +-step along each chart generator, re-centred at the current point after
/// every accepted move. The step starts at tol.step_initial and is multiplied
/// by tol.step_shrink after a pass without improvement; the search stops when
/// it falls below tol.step_floor or `max_evaluations` is spent (the start
/// point counts as one evaluation).
CoordinateSearchResult coordinate_search(const ComplexMatrix& start,
                                         const std::function<double(const ComplexMatrix&)>& objective,
                                         std::uint64_t max_evaluations, const Tolerances& tol = {});

/// Calls fn(i) for i in [0, count) on up to `workers` threads (0: hardware
/// concurrency). fn must only write state owned by index i.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace qmac

#endif
