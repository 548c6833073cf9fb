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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace unvd::vectors {

inline constexpr std::uint32_t kDefaultDimension = 2016;
inline constexpr std::uint16_t kFormatVersion = 1;

using Metadata = std::map<std::string, std::string>;

struct VectorRecord {
    std::string id;
    std::vector<float> vector;
    Metadata metadata;
};

struct QueryResult {
    std::string id;
    double distance = 0.0;
    Metadata metadata;
};

enum class UpsertAck { created, replaced };

struct NamespaceStats {
    std::uint64_t count = 0;
    std::uint32_t dimension = 0;
};

struct StoreManifest {
    std::uint32_t dimension = 0;
    std::vector<std::pair<std::string, std::uint64_t>> namespaces;
    std::uint16_t format_version = kFormatVersion;
};

/// 1 - cos(u, v), accumulated in double and clamped to [0, 2].
/// Throws DimensionMismatch or ZeroNorm.
double cosine_distance(std::span<const float> u, std::span<const float> v);

/// Namespaced exact-kNN store under cosine distance.
///
/// A store is either purely in-memory or attached to a directory via open().
/// An attached store appends every mutation to a per-namespace log next to a
/// snapshot file; compact() folds the log into the snapshot. Several processes
/// may attach the same directory: mutations are serialized with a file lock and
/// every read first picks up whatever other writers appended.
///
/// Directory layout: manifest.json, <namespace>.unvd (snapshot),
/// <namespace>.log (append log), .lock.
class VectorStore {
public:
    /// `dimension` of nullopt leaves it unset until the first upsert fixes it.
    explicit VectorStore(std::optional<std::uint32_t> dimension = kDefaultDimension);
    ~VectorStore();
    VectorStore(VectorStore&&) noexcept;
    VectorStore& operator=(VectorStore&&) noexcept;

    /// With `dimension` unset an existing store keeps its recorded dimension
    /// and a new one takes it from the first upsert.
    static VectorStore open(const std::filesystem::path& dir,
                            std::optional<std::uint32_t> dimension = std::nullopt);
    /// Detached in-memory copy of what persist() (or an attached store) wrote.
    static VectorStore load(const std::filesystem::path& dir);

    std::optional<std::uint32_t> dimension() const;
    bool attached() const;

    void create_namespace(std::string_view ns);
    bool has_namespace(std::string_view ns) const;

    UpsertAck upsert(std::string_view ns, VectorRecord record);
    bool remove(std::string_view ns, std::string_view id);

    std::optional<VectorRecord> fetch(std::string_view ns, std::string_view id) const;
    std::vector<std::string> list_ids(std::string_view ns) const;

    /// Exact scan; ascending distance, ties by id ascending; min(top_k, count) results.
    std::vector<QueryResult> query(std::string_view ns, std::span<const float> probe,
                                   std::size_t top_k) const;

    NamespaceStats stats(std::string_view ns) const;
    StoreManifest manifest() const;
    std::uint64_t total_count() const;

    /// Write a full snapshot set (manifest + one snapshot per namespace) to `dir`.
    StoreManifest persist(const std::filesystem::path& dir) const;
    /// Attached stores only: rewrite snapshots and truncate logs.
    void compact();
    /// Attached stores only: pick up changes made by other processes now.
    void refresh() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace unvd::vectors
