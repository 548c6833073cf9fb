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

#include "unvd/analytics/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "unvd/common/error.hpp"
#include "unvd/common/rng.hpp"

namespace unvd::analytics {

namespace {

constexpr double kFloor = 1e-12;

struct RowEntropy {
    double bits;
    double sum;
};

// Fills p with exp(-beta * d) over the shifted distances and returns the
// entropy in bits of the normalized row.
RowEntropy row_entropy(std::span<const double> d, std::size_t self, double beta, std::span<double> p) {
    double sum = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (j == self) {
            p[j] = 0.0;
            continue;
        }
        p[j] = std::exp(-beta * d[j]);
        sum += p[j];
        weighted += d[j] * p[j];
    }
    const double nats = std::log(sum) + beta * weighted / sum;
    return {nats / std::numbers::ln2, sum};
}

}  // namespace

Matrix conditional_affinities(const Matrix& squared_distances, const TsneOptions& options,
                              Calibration* calibration) {
    const auto n = squared_distances.rows();
    Matrix p(n, n);
    Calibration cal;
    cal.target_bits = std::log2(options.perplexity);
    cal.beta.resize(n);
    cal.entropy_bits.resize(n);
    cal.steps.resize(n);
    std::vector<double> shifted(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lo_d = std::numeric_limits<double>::infinity();
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                lo_d = std::min(lo_d, squared_distances(i, j));
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            shifted[j] = j == i ? 0.0 : squared_distances(i, j) - lo_d;
            mean += shifted[j];
        }
        mean /= static_cast<double>(n - 1);

        auto row = p.row(i);
        double beta = mean > 0.0 ? 1.0 / mean : 1.0;
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        RowEntropy h = row_entropy(shifted, i, beta, row);
        std::size_t step = 0;
        while (std::abs(h.bits - cal.target_bits) > options.entropy_tolerance &&
               step < options.max_bisection_steps) {
            if (h.bits > cal.target_bits) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
            h = row_entropy(shifted, i, beta, row);
            ++step;
        }
        for (double& v : row) {
            v /= h.sum;
        }
        cal.beta[i] = beta;
        cal.entropy_bits[i] = h.bits;
        cal.steps[i] = step;
        cal.max_error = std::max(cal.max_error, std::abs(h.bits - cal.target_bits));
    }
    if (calibration != nullptr) {
        *calibration = std::move(cal);
    }
    return p;
}

namespace {

// Student-t kernel numerators and their sum; num(i, i) is 0.
double kernel(const Matrix& y, Matrix& num) {
    const auto n = y.rows();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num(i, i) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 1.0 / (1.0 + squared_euclidean(y.row(i), y.row(j)));
            num(i, j) = num(j, i) = v;
            total += 2.0 * v;
        }
    }
    return total;
}

double kl_divergence(const Matrix& p, const Matrix& num, double total) {
    const auto n = p.rows();
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double q = std::max(num(i, j) / total, kFloor);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    }
    return kl;
}

}  // namespace

TsneResult tsne(const Matrix& x, const TsneOptions& options) {
    require_finite(x, "tsne input");
    const auto n = x.rows();
    if (n < 4) {
        raise(ErrorCode::InvalidArgument, "tsne needs at least 4 points, got " + std::to_string(n));
    }
    const double max_perplexity = static_cast<double>(n - 1) / 3.0;
    if (!(options.perplexity >= 1.0 && options.perplexity <= max_perplexity)) {
        raise(ErrorCode::PerplexityOutOfRange, "perplexity must be in [1, " + std::to_string(max_perplexity) +
                                                   "] for " + std::to_string(n) + " points");
    }
    if (options.dims < 1 || options.iterations < 1 || options.kl_every < 1) {
        raise(ErrorCode::InvalidArgument, "tsne needs dims, iterations and kl_every >= 1");
    }

    Matrix d2(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d2(i, j) = d2(j, i) = squared_euclidean(x.row(i), x.row(j));
        }
    }
    TsneResult result;
    const Matrix cond = conditional_affinities(d2, options, &result.calibration);

    Matrix p(n, n);
    const double denom = 2.0 * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            p(i, j) = i == j ? 0.0 : std::max((cond(i, j) + cond(j, i)) / denom, kFloor);
        }
    }

    const auto k = options.dims;
    Rng rng(options.seed);
    Matrix y(n, k);
    for (double& v : y.data()) {
        v = rng.normal() * 1e-4;
    }
    Matrix update(n, k);
    Matrix gains(n, k, 1.0);
    Matrix num(n, n);
    std::vector<double> grad(k);

    result.kl_trace.emplace_back(0, kl_divergence(p, num, kernel(y, num)));
    for (std::size_t it = 1; it <= options.iterations; ++it) {
        const double total = kernel(y, num);
        const double exaggeration = it <= options.exaggeration_iterations ? options.early_exaggeration : 1.0;
        const double momentum = it <= options.momentum_switch ? options.initial_momentum : options.final_momentum;
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    continue;
                }
                const double q = num(i, j) / total;
                const double w = 4.0 * (exaggeration * p(i, j) - q) * num(i, j);
                for (std::size_t c = 0; c < k; ++c) {
                    grad[c] += w * (y(i, c) - y(j, c));
                }
            }
            for (std::size_t c = 0; c < k; ++c) {
                double& g = gains(i, c);
                g = (grad[c] > 0.0) != (update(i, c) > 0.0) ? g + 0.2 : g * 0.8;
                g = std::max(g, 0.01);
                update(i, c) = momentum * update(i, c) - options.learning_rate * g * grad[c];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                y(i, c) += update(i, c);
                mean += y(i, c);
            }
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                y(i, c) -= mean;
            }
        }
        if (it % options.kl_every == 0 || it == options.iterations) {
            result.kl_trace.emplace_back(it, kl_divergence(p, num, kernel(y, num)));
        }
    }
    result.projection.points = std::move(y);
    if (result.calibration.max_error > options.entropy_tolerance) {
        result.projection.warnings.push_back("bandwidth search missed the entropy target by up to " +
                                             std::to_string(result.calibration.max_error) + " bits");
    }
    return result;
}

}  // namespace unvd::analytics
