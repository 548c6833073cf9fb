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

// Brute-force reference for the vector store: score every record with the
// textbook cosine formula and fully sort. Shares no code with the store.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace unvd::testing {

struct OracleHit {
    std::string id;
    double distance;
};

inline double oracle_cosine(const std::vector<float>& u, const std::vector<float>& v) {
    double dot = 0, uu = 0, vv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += double(u[i]) * double(v[i]);
        uu += double(u[i]) * double(u[i]);
        vv += double(v[i]) * double(v[i]);
    }
    double d = 1.0 - dot / (std::sqrt(uu) * std::sqrt(vv));
    return std::min(2.0, std::max(0.0, d));
}

inline std::vector<OracleHit> oracle_knn(const std::vector<std::pair<std::string, std::vector<float>>>& data,
                                         const std::vector<float>& probe, std::size_t k) {
    std::vector<OracleHit> all;
    all.reserve(data.size());
    for (const auto& [id, v] : data) {
        all.push_back({id, oracle_cosine(probe, v)});
    }
    std::sort(all.begin(), all.end(), [](const OracleHit& a, const OracleHit& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    });
    if (all.size() > k) {
        all.resize(k);
    }
    return all;
}

inline std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<float> dist(0.0f, 1.0f);
    std::vector<float> v(dim);
    do {
        for (auto& x : v) {
            x = dist(rng);
        }
    } while (std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; }));
    return v;
}

}  // namespace unvd::testing
