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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unvd/analytics/clustering.hpp"
#include "unvd/analytics/matrix.hpp"
#include "unvd/embedding/embedder.hpp"
#include "unvd/embedding/image_codec.hpp"

namespace unvd::analytics {

enum class Technique { mds, tsne, pca, tsvd, isomap };

std::string_view to_string(Technique t);
std::optional<Technique> parse_technique(std::string_view name);
const std::array<Technique, 5>& all_techniques();

struct ReduceOptions {
    std::size_t dims = 2;
    std::uint64_t seed = 0;
    /// Unset: min(30, (n-1)/3).
    std::optional<double> perplexity;
    std::size_t tsne_iterations = 1000;
    std::size_t isomap_neighbors = 10;
};

double default_perplexity(std::size_t n);

/// Runs one technique with the module's defaults.
ProjectedPoints reduce(const Matrix& x, Technique technique, const ReduceOptions& options = {});

struct LabeledMedia {
    std::string id;
    std::string label;
    std::string bytes;
};

struct LabeledVectors {
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    Matrix vectors;
};

LabeledVectors embed_labeled_media(const std::vector<LabeledMedia>& media, const embedding::Embedder& embedder,
                                   const embedding::DecodeLimits& limits = {});

struct ExperimentOptions {
    std::uint64_t seed = 2023;
    ReduceOptions reduce;  // reduce.seed is overwritten by seed
    std::vector<Technique> techniques{all_techniques().begin(), all_techniques().end()};
};

struct TechniqueRow {
    Technique technique = Technique::pca;
    std::optional<ClusterMetrics> metrics;
    /// Share of points whose k-means cluster matches their label's majority
    /// cluster; 0.5 is chance, 1 is perfect separation.
    double label_agreement = 0.0;
    double wall_ms = 0.0;
    std::optional<std::string> error;
    std::vector<std::string> warnings;
    Matrix points;
    std::vector<std::size_t> assignments;
};

struct ReductionReport {
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    double perplexity = 0.0;
    std::size_t isomap_neighbors = 0;
    std::size_t tsne_iterations = 0;
    std::vector<TechniqueRow> rows;      // in technique order
    std::vector<std::size_t> ranking;    // row indices, cluster_ratio descending, failures last

    const TechniqueRow& row(Technique t) const;
    /// Human-readable table, ranked.
    std::string to_table() const;
    /// One JSON object per technique and line, ranked: technique, rank,
    /// cluster_distance, collection_distance, cluster_ratio, label_agreement,
    /// wall_ms, seed and, for failures, error.
    std::string to_ndjson() const;
};

/// Reduce to 2-D with each technique, split with 2-means, score the split.
/// Requires exactly two labels with at least two samples each. A technique
/// that throws is recorded with its error; the others still run.
ReductionReport run_reduction_experiment(const LabeledVectors& data, const ExperimentOptions& options = {});

}  // namespace unvd::analytics
