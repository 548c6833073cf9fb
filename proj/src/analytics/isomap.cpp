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

#include "unvd/analytics/isomap.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "unvd/analytics/projection.hpp"
#include "unvd/common/error.hpp"

namespace unvd::analytics {

namespace {

struct Edge {
    std::size_t to;
    double weight;
};

using Graph = std::vector<std::vector<Edge>>;

Graph knn_graph(const Matrix& x, std::size_t neighbors) {
    const auto n = x.rows();
    const Matrix d = pairwise_distances(x);
    std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return d(i, a) < d(i, b); });
        std::size_t taken = 0;
        for (std::size_t j : order) {
            if (j == i) {
                continue;
            }
            if (taken++ == neighbors) {
                break;
            }
            linked[i][j] = linked[j][i] = true;
        }
    }
    Graph g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (linked[i][j]) {
                g[i].push_back({j, d(i, j)});
            }
        }
    }
    return g;
}

std::vector<std::size_t> component_sizes(const Graph& g) {
    std::vector<std::size_t> sizes;
    std::vector<bool> seen(g.size(), false);
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (seen[s]) {
            continue;
        }
        std::size_t size = 0;
        std::vector<std::size_t> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            ++size;
            for (const auto& e : g[v]) {
                if (!seen[e.to]) {
                    seen[e.to] = true;
                    stack.push_back(e.to);
                }
            }
        }
        sizes.push_back(size);
    }
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

}  // namespace

Matrix geodesic_distances(const Matrix& x, std::size_t neighbors) {
    require_finite(x, "isomap input");
    const auto n = x.rows();
    if (neighbors < 1 || neighbors >= n) {
        raise(ErrorCode::InvalidArgument, "isomap needs 1 <= neighbors < n, got neighbors=" +
                                              std::to_string(neighbors) + " n=" + std::to_string(n));
    }
    const Graph g = knn_graph(x, neighbors);
    if (const auto sizes = component_sizes(g); sizes.size() > 1) {
        std::string list;
        for (auto s : sizes) {
            list += (list.empty() ? "" : ", ") + std::to_string(s);
        }
        raise(ErrorCode::DisconnectedGraph, "neighbour graph with k=" + std::to_string(neighbors) + " has " +
                                                std::to_string(sizes.size()) + " components of sizes " + list);
    }

    Matrix out(n, n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    for (std::size_t s = 0; s < n; ++s) {
        auto dist = out.row(s);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        dist[s] = 0.0;
        queue.push({0.0, s});
        while (!queue.empty()) {
            const auto [du, u] = queue.top();
            queue.pop();
            if (du > dist[u]) {
                continue;
            }
            for (const auto& e : g[u]) {
                const double nd = du + e.weight;
                if (nd < dist[e.to]) {
                    dist[e.to] = nd;
                    queue.push({nd, e.to});
                }
            }
        }
    }
    // Dijkstra from each end can differ in the last bit; keep it symmetric.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out(i, j) = out(j, i) = std::min(out(i, j), out(j, i));
        }
    }
    return out;
}

ProjectedPoints isomap(const Matrix& x, std::size_t neighbors, std::size_t k) {
    return mds_from_distances(geodesic_distances(x, neighbors), k);
}

}  // namespace unvd::analytics
