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

#include "unvd/analytics/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unvd/common/error.hpp"
#include "unvd/common/rng.hpp"

namespace unvd::analytics {

namespace {

std::size_t nearest(const Matrix& centers, std::span<const double> p, double* dist2 = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        const double d = squared_euclidean(centers.row(c), p);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist2 != nullptr) {
        *dist2 = best_d;
    }
    return best;
}

Matrix seed_plus_plus(const Matrix& x, std::size_t k, Rng& rng) {
    const auto n = x.rows();
    Matrix centers(k, x.cols());
    std::vector<bool> chosen(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    auto take = [&](std::size_t idx, std::size_t slot) {
        chosen[idx] = true;
        std::copy(x.row(idx).begin(), x.row(idx).end(), centers.row(slot).begin());
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_euclidean(x.row(i), x.row(idx)));
        }
    };
    take(rng.below(n), 0);
    for (std::size_t slot = 1; slot < k; ++slot) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += chosen[i] ? 0.0 : d2[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            double r = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i] || d2[i] == 0.0) {
                    continue;
                }
                pick = i;
                r -= d2[i];
                if (r < 0.0) {
                    break;
                }
            }
        } else {
            // Every remaining point duplicates a centre: draw among the unchosen.
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    free.push_back(i);
                }
            }
            pick = free[rng.below(free.size())];
        }
        take(pick, slot);
    }
    return centers;
}

}  // namespace

double inertia(const Matrix& x, const std::vector<std::size_t>& assignments, const Matrix& centers) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        s += squared_euclidean(x.row(i), centers.row(assignments[i]));
    }
    return s;
}

KMeansResult kmeans(const Matrix& x, const KMeansOptions& options) {
    require_finite(x, "kmeans input");
    const auto n = x.rows();
    const auto k = options.k;
    if (k < 1 || k > n) {
        raise(ErrorCode::InvalidArgument, "kmeans needs 1 <= k <= n, got k=" + std::to_string(k) +
                                              " n=" + std::to_string(n));
    }
    Rng rng(options.seed);
    KMeansResult out;
    out.centers = seed_plus_plus(x, k, rng);
    out.assignments.assign(n, 0);
    std::vector<std::size_t> counts(k);
    std::vector<double> dist2(n);

    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            out.assignments[i] = nearest(out.centers, x.row(i), &dist2[i]);
            ++counts[out.assignments[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[out.assignments[i]] > 1 && (far == n || dist2[i] > dist2[far])) {
                    far = i;
                }
            }
            --counts[out.assignments[far]];
            out.assignments[far] = c;
            dist2[far] = 0.0;
            counts[c] = 1;
        }

        Matrix next(k, x.cols());
        for (std::size_t i = 0; i < n; ++i) {
            auto dst = next.row(out.assignments[i]);
            const auto src = x.row(i);
            for (std::size_t j = 0; j < src.size(); ++j) {
                dst[j] += src[j];
            }
        }
        double moved = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            for (double& v : next.row(c)) {
                v /= static_cast<double>(counts[c]);
            }
            moved = std::max(moved, euclidean(next.row(c), out.centers.row(c)));
        }
        out.centers = std::move(next);
        out.inertia_trace.push_back(inertia(x, out.assignments, out.centers));
        out.iterations = it;
        if (moved < options.tolerance) {
            out.converged = true;
            break;
        }
    }
    return out;
}

ClusterMetrics cluster_metrics(const Matrix& points, const std::vector<std::size_t>& assignments) {
    require_finite(points, "cluster points");
    if (assignments.size() != points.rows()) {
        raise(ErrorCode::InvalidArgument, "one assignment per point is required");
    }
    Matrix centers(2, points.cols());
    std::size_t counts[2] = {0, 0};
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto a = assignments[i];
        if (a > 1) {
            raise(ErrorCode::InvalidArgument, "cluster metrics take exactly two clusters labelled 0 and 1");
        }
        ++counts[a];
        auto dst = centers.row(a);
        for (std::size_t j = 0; j < points.cols(); ++j) {
            dst[j] += points(i, j);
        }
    }
    if (counts[0] == 0 || counts[1] == 0) {
        raise(ErrorCode::InvalidArgument, "both clusters must be non-empty");
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (double& v : centers.row(c)) {
            v /= static_cast<double>(counts[c]);
        }
    }
    ClusterMetrics m;
    m.cluster_distance = euclidean(centers.row(0), centers.row(1));
    for (std::size_t i = 0; i < points.rows(); ++i) {
        m.collection_distance += euclidean(points.row(i), centers.row(assignments[i]));
    }
    m.collection_distance /= static_cast<double>(points.rows());
    if (m.collection_distance > 0.0) {
        m.cluster_ratio = m.cluster_distance / m.collection_distance;
    } else {
        m.degenerate = true;
        m.cluster_ratio = m.cluster_distance > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return m;
}

}  // namespace unvd::analytics
