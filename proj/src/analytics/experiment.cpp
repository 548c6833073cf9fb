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

#include "unvd/analytics/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "unvd/analytics/isomap.hpp"
#include "unvd/analytics/projection.hpp"
#include "unvd/analytics/tsne.hpp"
#include "unvd/common/error.hpp"

namespace unvd::analytics {

namespace {

constexpr std::array<Technique, 5> kTechniques{Technique::mds, Technique::tsne, Technique::pca, Technique::tsvd,
                                               Technique::isomap};

}  // namespace

std::string_view to_string(Technique t) {
    switch (t) {
    case Technique::mds: return "mds";
    case Technique::tsne: return "tsne";
    case Technique::pca: return "pca";
    case Technique::tsvd: return "tsvd";
    case Technique::isomap: return "isomap";
    }
    return "pca";
}

std::optional<Technique> parse_technique(std::string_view name) {
    for (auto t : kTechniques) {
        if (to_string(t) == name) {
            return t;
        }
    }
    return std::nullopt;
}

const std::array<Technique, 5>& all_techniques() { return kTechniques; }

double default_perplexity(std::size_t n) {
    return std::min(30.0, std::floor(static_cast<double>(n > 0 ? n - 1 : 0) / 3.0));
}

ProjectedPoints reduce(const Matrix& x, Technique technique, const ReduceOptions& options) {
    switch (technique) {
    case Technique::mds: return mds_classical(x, options.dims);
    case Technique::pca: return pca(x, options.dims);
    case Technique::tsvd: return tsvd(x, options.dims);
    case Technique::isomap: return isomap(x, options.isomap_neighbors, options.dims);
    case Technique::tsne: {
        TsneOptions t;
        t.dims = options.dims;
        t.seed = options.seed;
        t.iterations = options.tsne_iterations;
        t.perplexity = options.perplexity.value_or(default_perplexity(x.rows()));
        return tsne(x, t).projection;
    }
    }
    raise(ErrorCode::InvalidArgument, "unknown technique");
}

LabeledVectors embed_labeled_media(const std::vector<LabeledMedia>& media, const embedding::Embedder& embedder,
                                   const embedding::DecodeLimits& limits) {
    LabeledVectors out;
    std::vector<std::vector<float>> rows;
    rows.reserve(media.size());
    for (const auto& m : media) {
        rows.push_back(embedding::embed_media(embedder, m.bytes, limits));
        out.ids.push_back(m.id);
        out.labels.push_back(m.label);
    }
    out.vectors = Matrix::from_rows(rows);
    return out;
}

const TechniqueRow& ReductionReport::row(Technique t) const {
    for (const auto& r : rows) {
        if (r.technique == t) {
            return r;
        }
    }
    raise(ErrorCode::InvalidArgument, "technique " + std::string(to_string(t)) + " is not in the report");
}

namespace {

double agreement(const std::vector<std::size_t>& assignments, const std::vector<std::string>& labels) {
    const auto& first = labels.front();
    std::size_t same = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        same += (labels[i] == first) == (assignments[i] == assignments.front()) ? 1 : 0;
    }
    const double frac = static_cast<double>(same) / static_cast<double>(labels.size());
    return std::max(frac, 1.0 - frac);
}

std::string ratio_text(const ClusterMetrics& m) {
    return std::isinf(m.cluster_ratio) ? "inf" : fmt::format("{:.6f}", m.cluster_ratio);
}

}  // namespace

ReductionReport run_reduction_experiment(const LabeledVectors& data, const ExperimentOptions& options) {
    const auto n = data.vectors.rows();
    if (data.labels.size() != n || data.ids.size() != n) {
        raise(ErrorCode::InvalidArgument, "ids, labels and vectors must have the same length");
    }
    std::map<std::string, std::size_t> per_label;
    for (const auto& l : data.labels) {
        ++per_label[l];
    }
    if (per_label.size() != 2) {
        raise(ErrorCode::InvalidArgument, "the experiment needs exactly two collections, got " +
                                              std::to_string(per_label.size()));
    }
    for (const auto& [label, count] : per_label) {
        if (count < 2) {
            raise(ErrorCode::InvalidArgument, "collection '" + label + "' has fewer than two samples");
        }
    }
    require_finite(data.vectors, "experiment vectors");

    ReductionReport report;
    report.seed = options.seed;
    report.samples = n;
    ReduceOptions ro = options.reduce;
    ro.seed = options.seed;
    ro.dims = 2;
    report.perplexity = ro.perplexity.value_or(default_perplexity(n));
    report.isomap_neighbors = ro.isomap_neighbors;
    report.tsne_iterations = ro.tsne_iterations;

    for (auto technique : options.techniques) {
        TechniqueRow row;
        row.technique = technique;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto projected = reduce(data.vectors, technique, ro);
            KMeansOptions km;
            km.k = 2;
            km.seed = options.seed;
            auto clusters = kmeans(projected.points, km);
            row.metrics = cluster_metrics(projected.points, clusters.assignments);
            row.label_agreement = agreement(clusters.assignments, data.labels);
            row.warnings = std::move(projected.warnings);
            row.points = std::move(projected.points);
            row.assignments = std::move(clusters.assignments);
        } catch (const Error& e) {
            row.error = e.what();
        }
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        report.rows.push_back(std::move(row));
    }

    report.ranking.resize(report.rows.size());
    std::iota(report.ranking.begin(), report.ranking.end(), 0);
    std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = report.rows[a];
        const auto& rb = report.rows[b];
        if (ra.metrics.has_value() != rb.metrics.has_value()) {
            return ra.metrics.has_value();
        }
        return ra.metrics && ra.metrics->cluster_ratio > rb.metrics->cluster_ratio;
    });
    return report;
}

std::string ReductionReport::to_table() const {
    std::string out = fmt::format("samples={} seed={} perplexity={} isomap_neighbors={} tsne_iterations={}\n",
                                  samples, seed, perplexity, isomap_neighbors, tsne_iterations);
    out += fmt::format("{:<4} {:<8} {:>16} {:>19} {:>13} {:>10} {:>10}\n", "rank", "method", "cluster_distance",
                       "collection_distance", "cluster_ratio", "agreement", "wall_ms");
    std::size_t rank = 1;
    for (auto idx : ranking) {
        const auto& r = rows[idx];
        if (r.metrics) {
            out += fmt::format("{:<4} {:<8} {:>16.6f} {:>19.6f} {:>13} {:>10.3f} {:>10.1f}\n", rank,
                               to_string(r.technique), r.metrics->cluster_distance, r.metrics->collection_distance,
                               ratio_text(*r.metrics), r.label_agreement, r.wall_ms);
        } else {
            out += fmt::format("{:<4} {:<8} failed: {}\n", "-", to_string(r.technique), r.error.value_or("?"));
        }
        ++rank;
    }
    if (!ranking.empty() && rows[ranking.front()].metrics) {
        out += fmt::format("highest cluster ratio: {}\n", to_string(rows[ranking.front()].technique));
    }
    return out;
}

std::string ReductionReport::to_ndjson() const {
    std::string out;
    std::size_t rank = 1;
    for (auto idx : ranking) {
        const auto& r = rows[idx];
        nlohmann::json j;
        j["technique"] = to_string(r.technique);
        j["seed"] = seed;
        j["wall_ms"] = r.wall_ms;
        if (r.metrics) {
            j["rank"] = rank;
            j["cluster_distance"] = r.metrics->cluster_distance;
            j["collection_distance"] = r.metrics->collection_distance;
            if (std::isinf(r.metrics->cluster_ratio)) {
                j["cluster_ratio"] = "inf";
            } else {
                j["cluster_ratio"] = r.metrics->cluster_ratio;
            }
            j["label_agreement"] = r.label_agreement;
        } else {
            j["rank"] = nullptr;
            j["error"] = r.error.value_or("");
        }
        out += j.dump() + "\n";
        ++rank;
    }
    return out;
}

}  // namespace unvd::analytics
