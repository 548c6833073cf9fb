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
#include <vector>

#include "unvd/analytics/matrix.hpp"

namespace unvd::analytics {

struct KMeansOptions {
    std::size_t k = 2;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 300;
    /// Stop once no centre moves further than this.
    double tolerance = 1e-6;
};

struct KMeansResult {
    std::vector<std::size_t> assignments;
    Matrix centers;
    /// Inertia after each Lloyd iteration.
    std::vector<double> inertia_trace;
    std::size_t iterations = 0;
    bool converged = false;

    double inertia() const { return inertia_trace.empty() ? 0.0 : inertia_trace.back(); }
};

/// k-means++ seeding then Lloyd iterations. A cluster that empties takes the
/// point farthest from its centre. Requires 1 <= k <= n.
KMeansResult kmeans(const Matrix& x, const KMeansOptions& options = {});

/// Sum of squared distances from each point to its assigned centre.
double inertia(const Matrix& x, const std::vector<std::size_t>& assignments, const Matrix& centers);

struct ClusterMetrics {
    /// Distance between the two cluster means.
    double cluster_distance = 0.0;
    /// Mean distance of every point to its own cluster's mean.
    double collection_distance = 0.0;
    /// cluster_distance / collection_distance; +inf when only the
    /// denominator is zero, 0 when both are.
    double cluster_ratio = 0.0;
    bool degenerate = false;
};

/// Requires labels 0 and 1 only, both present, one per point.
ClusterMetrics cluster_metrics(const Matrix& points, const std::vector<std::size_t>& assignments);

}  // namespace unvd::analytics
