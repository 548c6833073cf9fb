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

#include <algorithm>
#include <cmath>

#include "unvd/common/error.hpp"
#include "unvd/vectors/vector_store.hpp"

namespace unvd::vectors {

double cosine_distance(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size()) {
        raise(ErrorCode::DimensionMismatch, "cosine_distance of vectors with lengths " +
                                                std::to_string(u.size()) + " and " +
                                                std::to_string(v.size()));
    }
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = u[i];
        const double b = v[i];
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if (uu == 0.0 || vv == 0.0) {
        raise(ErrorCode::ZeroNorm, "cosine distance undefined for a zero vector");
    }
    const double d = 1.0 - dot / (std::sqrt(uu) * std::sqrt(vv));
    return std::clamp(d, 0.0, 2.0);
}

}  // namespace unvd::vectors
