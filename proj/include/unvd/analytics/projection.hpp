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

/// Principal component scores: the mean-centred rows projected onto the top-k
/// covariance eigenvectors, eigenvalues descending. Each component is signed
/// so its largest-magnitude loading is positive (first such index on ties).
/// Components beyond the numerical rank come back as zero columns with a
/// RankDeficient warning. Requires 1 <= k <= min(n-1, d).
ProjectedPoints pca(const Matrix& x, std::size_t k);

/// Truncated SVD scores X * V_k of the uncentred rows, singular values
/// descending, same sign and padding rules as pca. Requires 1 <= k <= min(n, d).
ProjectedPoints tsvd(const Matrix& x, std::size_t k);

/// Classical (Torgerson) scaling of the rows' Euclidean distances.
ProjectedPoints mds_classical(const Matrix& x, std::size_t k);

/// Classical scaling of a precomputed symmetric distance matrix:
/// B = -1/2 J D^2 J, coordinates = top-k eigenvectors scaled by sqrt(lambda).
/// Non-positive eigenvalues give zero columns (negative ones add a warning).
/// All-zero distances yield zeros with a DegenerateInput warning; n = 1
/// yields a single zero point. Otherwise requires n >= k + 1.
ProjectedPoints mds_from_distances(const Matrix& distances, std::size_t k);

}  // namespace unvd::analytics
