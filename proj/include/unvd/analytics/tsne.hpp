// Copyright 2026-present the unvd project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "unvd/analytics/matrix.hpp"

namespace unvd::analytics {

struct TsneOptions {
    double perplexity = 30.0;
    std::uint64_t seed = 0;
    std::size_t iterations = 1000;
    std::size_t dims = 2;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iterations = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch = 250;
    /// Bandwidth search: |H - log2(perplexity)| target and step budget.
    double entropy_tolerance = 1e-5;
    std::size_t max_bisection_steps = 50;
    /// KL(P||Q) is sampled every this many iterations (and at the end).
    std::size_t kl_every = 50;
};

/// Per-point Gaussian precision (beta = 1 / 2 sigma^2) and the entropy, in
/// bits, of the conditional distribution it produced.
struct Calibration {
    std::vector<double> beta;
    std::vector<double> entropy_bits;
    std::vector<std::size_t> steps;
    double target_bits = 0.0;
    double max_error = 0.0;
};

struct TsneResult {
    ProjectedPoints projection;
    Calibration calibration;
    /// (iteration, KL) pairs; iteration 0 is the seeded starting layout.
    std::vector<std::pair<std::size_t, double>> kl_trace;

    double initial_kl() const { return kl_trace.front().second; }
    double final_kl() const { return kl_trace.back().second; }
};

/// Row-stochastic P(j|i) from squared distances, each row's bandwidth found
/// by bisection so its entropy matches log2(perplexity).
Matrix conditional_affinities(const Matrix& squared_distances, const TsneOptions& options,
                              Calibration* calibration = nullptr);

/// Exact O(n^2) t-SNE with a Student-t (one degree of freedom) kernel.
/// Requires n >= 4 and 1 <= perplexity <= (n-1)/3 (PerplexityOutOfRange).
/// Output is bit-identical for the same input, options and build.
TsneResult tsne(const Matrix& x, const TsneOptions& options = {});

}  // namespace unvd::analytics
