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

#include "unvd/analytics/matrix.hpp"

namespace unvd::analytics {

/// Shortest-path distances over the symmetrised k-nearest-neighbour graph
/// (edge weight = Euclidean distance; neighbour ties go to the lower index).
/// Throws DisconnectedGraph, naming the component sizes, when the graph
/// falls apart. Requires 1 <= neighbors < n.
Matrix geodesic_distances(const Matrix& x, std::size_t neighbors);

/// Classical scaling of the geodesic distances.
ProjectedPoints isomap(const Matrix& x, std::size_t neighbors = 10, std::size_t k = 2);

}  // namespace unvd::analytics
