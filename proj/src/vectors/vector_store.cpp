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

#include "unvd/vectors/vector_store.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include <json.hpp>

#include "record_codec.hpp"
#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"

namespace fs = std::filesystem;

namespace unvd::vectors {

namespace {

constexpr std::string_view kSnapshotExt = ".unvd";
constexpr std::string_view kLogExt = ".log";
constexpr std::string_view kManifestName = "manifest.json";

void check_namespace_name(std::string_view ns) {
    const bool ok = !ns.empty() && ns.size() <= 64 && ns.front() != '.' &&
                    std::all_of(ns.begin(), ns.end(), [](char c) {
                        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                               c == '-' || c == '.';
                    });
    if (!ok) {
        raise(ErrorCode::InvalidArgument, "invalid namespace name '" + std::string(ns) + "'");
    }
}

/// Euclidean norm of a finite, nonzero vector; raises otherwise.
double checked_norm(std::span<const float> v) {
    double sq = 0.0;
    for (float x : v) {
        if (!std::isfinite(x)) {
            raise(ErrorCode::InvalidArgument, "vector contains NaN or Inf");
        }
        sq += static_cast<double>(x) * static_cast<double>(x);
    }
    if (sq == 0.0) {
        raise(ErrorCode::ZeroNorm, "zero vector has no cosine distance");
    }
    return std::sqrt(sq);
}

void check_record(const VectorRecord& rec) {
    if (rec.id.empty()) {
        raise(ErrorCode::InvalidId, "record id must be non-empty");
    }
    if (rec.id.size() > 0xffff) {
        raise(ErrorCode::InvalidId, "record id longer than 65535 bytes");
    }
    if (rec.metadata.size() > 0xffff) {
        raise(ErrorCode::InvalidArgument, "too many metadata entries");
    }
    for (const auto& [k, v] : rec.metadata) {
        if (k.size() > 0xffff || v.size() > 0xffff) {
            raise(ErrorCode::InvalidArgument, "metadata entry longer than 65535 bytes");
        }
    }
}

struct Namespace {
    std::vector<std::string> ids;
    std::vector<float> data;
    std::vector<double> norms;
    std::vector<Metadata> metadata;
    std::unordered_map<std::string, std::size_t> index;

    std::size_t size() const { return ids.size(); }

    std::span<const float> row(std::size_t i, std::uint32_t dim) const {
        return {data.data() + i * dim, dim};
    }

    UpsertAck put(VectorRecord&& rec, std::uint32_t dim, double norm) {
        if (auto it = index.find(rec.id); it != index.end()) {
            const auto i = it->second;
            std::copy(rec.vector.begin(), rec.vector.end(), data.begin() + i * dim);
            norms[i] = norm;
            metadata[i] = std::move(rec.metadata);
            return UpsertAck::replaced;
        }
        index.emplace(rec.id, ids.size());
        ids.push_back(std::move(rec.id));
        data.insert(data.end(), rec.vector.begin(), rec.vector.end());
        norms.push_back(norm);
        metadata.push_back(std::move(rec.metadata));
        return UpsertAck::created;
    }

    bool erase(std::string_view id, std::uint32_t dim) {
        auto it = index.find(std::string(id));
        if (it == index.end()) {
            return false;
        }
        const auto i = it->second;
        const auto last = ids.size() - 1;
        index.erase(it);
        if (i != last) {
            ids[i] = std::move(ids[last]);
            std::copy(data.begin() + last * dim, data.begin() + (last + 1) * dim,
                      data.begin() + i * dim);
            norms[i] = norms[last];
            metadata[i] = std::move(metadata[last]);
            index[ids[i]] = i;
        }
        ids.pop_back();
        data.resize(last * dim);
        norms.pop_back();
        metadata.pop_back();
        return true;
    }

    VectorRecord record(std::size_t i, std::uint32_t dim) const {
        const auto r = row(i, dim);
        return VectorRecord{ids[i], std::vector<float>(r.begin(), r.end()), metadata[i]};
    }

    void apply(codec::LogEntry&& entry, std::uint32_t dim) {
        if (auto* rec = std::get_if<VectorRecord>(&entry)) {
            const double norm = checked_norm(rec->vector);
            put(std::move(*rec), dim, norm);
        } else {
            erase(std::get<codec::Tombstone>(entry).id, dim);
        }
    }
};

struct FileState {
    std::optional<FileIdentity> snapshot;
    std::optional<FileIdentity> log;
    std::uint64_t log_offset = 0;
};

std::optional<std::uint32_t> read_manifest_dimension(const fs::path& dir) {
    const auto path = dir / kManifestName;
    if (!fs::exists(path)) {
        return std::nullopt;
    }
    const auto text = read_file(path);
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        raise(ErrorCode::CorruptFile, "unreadable " + path.string(), 0);
    }
    if (doc.value("format_version", 0) != kFormatVersion) {
        raise(ErrorCode::CorruptFile, "unsupported manifest version in " + path.string(), 0);
    }
    if (!doc.contains("dimension") || doc["dimension"].is_null()) {
        return std::nullopt;
    }
    return doc["dimension"].get<std::uint32_t>();
}

void write_manifest(const fs::path& dir, const StoreManifest& m) {
    nlohmann::json doc;
    doc["format_version"] = m.format_version;
    doc["dimension"] = m.dimension == 0 ? nlohmann::json(nullptr) : nlohmann::json(m.dimension);
    auto ns = nlohmann::json::array();
    for (const auto& [name, count] : m.namespaces) {
        ns.push_back({{"name", name}, {"count", count}});
    }
    doc["namespaces"] = ns;
    write_file_atomic(dir / kManifestName, doc.dump(2) + "\n");
}

/// Namespace names that have a snapshot or log in `dir`.
std::vector<std::string> namespaces_on_disk(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const auto name = entry.path().filename().string();
        for (auto ext : {kSnapshotExt, kLogExt}) {
            if (name.size() > ext.size() && name.ends_with(ext) && name.front() != '.') {
                names.push_back(name.substr(0, name.size() - ext.size()));
            }
        }
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

}  // namespace

struct VectorStore::Impl {
    std::optional<std::uint32_t> dimension;
    std::map<std::string, Namespace, std::less<>> namespaces;
    mutable std::shared_mutex data_mutex;

    // Attached mode only.
    std::optional<fs::path> dir;
    std::unique_ptr<LockFile> lock;
    std::mutex io_mutex;
    std::map<std::string, FileState, std::less<>> files;

    fs::path snapshot_path(std::string_view ns) const {
        return *dir / (std::string(ns) + std::string(kSnapshotExt));
    }
    fs::path log_path(std::string_view ns) const {
        return *dir / (std::string(ns) + std::string(kLogExt));
    }

    std::uint32_t require_dimension() const {
        if (!dimension) {
            raise(ErrorCode::DimensionMismatch, "store dimension not fixed yet");
        }
        return *dimension;
    }

    // --- disk -> memory -------------------------------------------------

    void adopt_dimension(std::uint32_t d, const std::string& source) {
        if (!dimension) {
            dimension = d;
        } else if (*dimension != d) {
            raise(ErrorCode::CorruptFile,
                  source + " has dimension " + std::to_string(d) + ", store has " +
                      std::to_string(*dimension),
                  6);
        }
    }

    /// Reads snapshot + full log of `ns`. Caller holds the file lock.
    std::pair<Namespace, FileState> read_namespace(std::string_view ns) {
        Namespace fresh;
        FileState st;
        st.snapshot = file_identity(snapshot_path(ns));
        st.log = file_identity(log_path(ns));
        if (st.snapshot) {
            auto snap = codec::decode_snapshot(read_file(snapshot_path(ns)));
            adopt_dimension(snap.dimension, snapshot_path(ns).string());
            for (auto& rec : snap.records) {
                fresh.apply(std::move(rec), snap.dimension);
            }
        }
        if (st.log) {
            const auto bytes = read_file(log_path(ns));
            const auto d = codec::decode_log_header(bytes);
            adopt_dimension(d, log_path(ns).string());
            auto entries = codec::decode_log_entries(
                std::string_view(bytes).substr(codec::kLogHeaderSize), codec::kLogHeaderSize, d);
            for (auto& e : entries) {
                fresh.apply(std::move(e), d);
            }
            st.log_offset = bytes.size();
            st.log->size = bytes.size();
        }
        return {std::move(fresh), st};
    }

    bool needs_sync(std::string_view ns) {
        const auto snap = file_identity(snapshot_path(ns));
        const auto log = file_identity(log_path(ns));
        auto it = files.find(ns);
        if (it == files.end()) {
            return snap || log;
        }
        const auto& st = it->second;
        if (snap != st.snapshot) {
            return true;
        }
        if (log.has_value() != st.log.has_value()) {
            return true;
        }
        return log && (!log->same_file(*st.log) || log->size != st.log_offset);
    }

    /// Brings `ns` up to date with disk. Caller holds io_mutex and the file
    /// lock (shared or exclusive).
    void sync_locked(std::string_view ns) {
        if (!dimension) {
            dimension = read_manifest_dimension(*dir);
        }
        const auto snap = file_identity(snapshot_path(ns));
        const auto log = file_identity(log_path(ns));
        auto fit = files.find(ns);
        if (!snap && !log) {
            if (fit != files.end()) {
                files.erase(fit);
                std::unique_lock data(data_mutex);
                if (auto nit = namespaces.find(ns); nit != namespaces.end()) {
                    namespaces.erase(nit);
                }
            }
            return;
        }
        const bool known = fit != files.end();
        const bool reload = !known || snap != fit->second.snapshot ||
                            log.has_value() != fit->second.log.has_value() ||
                            (log && !log->same_file(*fit->second.log)) ||
                            (log && log->size < fit->second.log_offset);
        if (reload) {
            auto [fresh, st] = read_namespace(ns);
            std::unique_lock data(data_mutex);
            namespaces.insert_or_assign(std::string(ns), std::move(fresh));
            files.insert_or_assign(std::string(ns), st);
            return;
        }
        auto& st = fit->second;
        if (log && log->size > st.log_offset) {
            const auto d = require_dimension();
            const auto bytes = read_file_range(log_path(ns), st.log_offset, log->size - st.log_offset);
            auto entries = codec::decode_log_entries(bytes, st.log_offset, d);
            {
                std::unique_lock data(data_mutex);
                auto& target = namespaces[std::string(ns)];
                for (auto& e : entries) {
                    target.apply(std::move(e), d);
                }
            }
            st.log_offset += bytes.size();
            st.log = log;
            st.log->size = st.log_offset;
        }
    }

    /// Read-path sync: cheap stat check, shared file lock only on change.
    void sync_for_read(std::string_view ns) {
        if (!dir) {
            return;
        }
        std::lock_guard io(io_mutex);
        if (!needs_sync(ns) && dimension) {
            return;
        }
        std::shared_lock flock(*lock);
        sync_locked(ns);
    }

    void sync_all_locked() {
        if (!dimension) {
            dimension = read_manifest_dimension(*dir);
        }
        auto names = namespaces_on_disk(*dir);
        for (const auto& [name, _] : files) {
            names.push_back(name);
        }
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        for (const auto& name : names) {
            sync_locked(name);
        }
    }

    void sync_all_for_read() {
        if (!dir) {
            return;
        }
        std::lock_guard io(io_mutex);
        std::shared_lock flock(*lock);
        sync_all_locked();
    }

    // --- memory -> disk -------------------------------------------------

    void ensure_log_locked(std::string_view ns) {
        auto& st = files[std::string(ns)];
        if (st.log) {
            return;
        }
        const auto header = codec::encode_log_header(require_dimension());
        write_file_atomic(log_path(ns), header);
        st.log = file_identity(log_path(ns));
        st.log_offset = header.size();
    }

    void append_locked(std::string_view ns, std::string_view entry) {
        ensure_log_locked(ns);
        AppendFile out(log_path(ns));
        out.append(entry);
        auto& st = files[std::string(ns)];
        st.log_offset += entry.size();
        st.log->size = st.log_offset;
    }

    void fix_dimension_locked(std::uint32_t d) {
        dimension = d;
        if (dir) {
            StoreManifest m;
            m.dimension = d;
            write_manifest(*dir, m);
        }
    }

    StoreManifest manifest_unlocked() const {
        StoreManifest m;
        m.dimension = dimension.value_or(0);
        for (const auto& [name, ns] : namespaces) {
            m.namespaces.emplace_back(name, ns.size());
        }
        return m;
    }

    void write_snapshot(const fs::path& path, const Namespace& ns) const {
        std::vector<std::size_t> order(ns.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return ns.ids[a] < ns.ids[b]; });
        const auto d = dimension.value_or(0);
        std::vector<VectorRecord> records;
        records.reserve(order.size());
        for (auto i : order) {
            records.push_back(ns.record(i, d));
        }
        std::vector<const VectorRecord*> ptrs;
        ptrs.reserve(records.size());
        for (const auto& r : records) {
            ptrs.push_back(&r);
        }
        write_file_atomic(path, codec::encode_snapshot(d, ptrs));
    }
};

VectorStore::VectorStore(std::optional<std::uint32_t> dimension) : impl_(std::make_unique<Impl>()) {
    if (dimension && *dimension == 0) {
        raise(ErrorCode::InvalidArgument, "dimension must be positive");
    }
    impl_->dimension = dimension;
}

VectorStore::~VectorStore() = default;
VectorStore::VectorStore(VectorStore&&) noexcept = default;
VectorStore& VectorStore::operator=(VectorStore&&) noexcept = default;

VectorStore VectorStore::open(const fs::path& dir, std::optional<std::uint32_t> dimension) {
    fs::create_directories(dir);
    VectorStore store(std::nullopt);
    auto& impl = *store.impl_;
    impl.dir = dir;
    impl.lock = std::make_unique<LockFile>(dir / ".lock");
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    const auto on_disk = read_manifest_dimension(dir);
    if (on_disk && dimension && *on_disk != *dimension) {
        raise(ErrorCode::DimensionMismatch, "store at " + dir.string() + " has dimension " +
                                                std::to_string(*on_disk) + ", requested " +
                                                std::to_string(*dimension));
    }
    if (on_disk) {
        impl.dimension = on_disk;
    } else if (dimension) {
        impl.fix_dimension_locked(*dimension);
    }
    impl.sync_all_locked();
    return store;
}

VectorStore VectorStore::load(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        raise(ErrorCode::IoError, "no store directory at " + dir.string());
    }
    VectorStore store(std::nullopt);
    auto& impl = *store.impl_;
    impl.dir = dir;
    {
        LockFile lock(dir / ".lock");
        std::shared_lock flock(lock);
        impl.dimension = read_manifest_dimension(dir);
        for (const auto& name : namespaces_on_disk(dir)) {
            auto [ns, st] = impl.read_namespace(name);
            impl.namespaces.emplace(name, std::move(ns));
        }
    }
    impl.dir.reset();
    impl.files.clear();
    return store;
}

std::optional<std::uint32_t> VectorStore::dimension() const {
    if (impl_->dir && !impl_->dimension) {
        impl_->sync_all_for_read();
    }
    std::shared_lock data(impl_->data_mutex);
    return impl_->dimension;
}

bool VectorStore::attached() const { return impl_->dir.has_value(); }

void VectorStore::create_namespace(std::string_view ns) {
    check_namespace_name(ns);
    auto& impl = *impl_;
    if (impl.dir) {
        std::lock_guard io(impl.io_mutex);
        std::unique_lock flock(*impl.lock);
        impl.sync_locked(ns);
        if (impl.files.count(ns) == 0) {
            impl.ensure_log_locked(ns);
        }
    }
    std::unique_lock data(impl.data_mutex);
    impl.namespaces.try_emplace(std::string(ns));
}

bool VectorStore::has_namespace(std::string_view ns) const {
    impl_->sync_for_read(ns);
    std::shared_lock data(impl_->data_mutex);
    return impl_->namespaces.find(ns) != impl_->namespaces.end();
}

UpsertAck VectorStore::upsert(std::string_view ns, VectorRecord record) {
    check_namespace_name(ns);
    check_record(record);
    const double norm = checked_norm(record.vector);
    auto& impl = *impl_;

    auto apply = [&]() {
        std::unique_lock data(impl.data_mutex);
        if (!impl.dimension) {
            impl.fix_dimension_locked(static_cast<std::uint32_t>(record.vector.size()));
        }
        return impl.namespaces[std::string(ns)].put(std::move(record), *impl.dimension, norm);
    };
    auto check_dim = [&]() {
        if (impl.dimension && record.vector.size() != *impl.dimension) {
            raise(ErrorCode::DimensionMismatch,
                  "vector has " + std::to_string(record.vector.size()) +
                      " components, namespace dimension is " + std::to_string(*impl.dimension));
        }
    };

    if (!impl.dir) {
        std::unique_lock data(impl.data_mutex);
        check_dim();
        if (!impl.dimension) {
            impl.dimension = static_cast<std::uint32_t>(record.vector.size());
        }
        return impl.namespaces[std::string(ns)].put(std::move(record), *impl.dimension, norm);
    }

    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    impl.sync_locked(ns);
    check_dim();
    if (!impl.dimension) {
        impl.fix_dimension_locked(static_cast<std::uint32_t>(record.vector.size()));
    }
    impl.append_locked(ns, codec::encode_log_upsert(record));
    return apply();
}

bool VectorStore::remove(std::string_view ns, std::string_view id) {
    auto& impl = *impl_;
    if (!impl.dir) {
        std::unique_lock data(impl.data_mutex);
        auto it = impl.namespaces.find(ns);
        if (it == impl.namespaces.end()) {
            raise(ErrorCode::UnknownNamespace, "no namespace '" + std::string(ns) + "'");
        }
        return it->second.erase(id, impl.dimension.value_or(0));
    }
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    impl.sync_locked(ns);
    std::unique_lock data(impl.data_mutex);
    auto it = impl.namespaces.find(ns);
    if (it == impl.namespaces.end()) {
        raise(ErrorCode::UnknownNamespace, "no namespace '" + std::string(ns) + "'");
    }
    if (it->second.index.count(std::string(id)) == 0) {
        return false;
    }
    impl.append_locked(ns, codec::encode_log_tombstone(id));
    return it->second.erase(id, impl.dimension.value_or(0));
}

std::optional<VectorRecord> VectorStore::fetch(std::string_view ns, std::string_view id) const {
    impl_->sync_for_read(ns);
    std::shared_lock data(impl_->data_mutex);
    auto it = impl_->namespaces.find(ns);
    if (it == impl_->namespaces.end()) {
        raise(ErrorCode::UnknownNamespace, "no namespace '" + std::string(ns) + "'");
    }
    auto rec = it->second.index.find(std::string(id));
    if (rec == it->second.index.end()) {
        return std::nullopt;
    }
    return it->second.record(rec->second, impl_->dimension.value_or(0));
}

std::vector<std::string> VectorStore::list_ids(std::string_view ns) const {
    impl_->sync_for_read(ns);
    std::shared_lock data(impl_->data_mutex);
    auto it = impl_->namespaces.find(ns);
    if (it == impl_->namespaces.end()) {
        raise(ErrorCode::UnknownNamespace, "no namespace '" + std::string(ns) + "'");
    }
    auto ids = it->second.ids;
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<QueryResult> VectorStore::query(std::string_view ns, std::span<const float> probe,
                                            std::size_t top_k) const {
    if (top_k == 0) {
        raise(ErrorCode::InvalidArgument, "top_k must be at least 1");
    }
    impl_->sync_for_read(ns);
    std::shared_lock data(impl_->data_mutex);
    auto it = impl_->namespaces.find(ns);
    if (it == impl_->namespaces.end()) {
        raise(ErrorCode::UnknownNamespace, "no namespace '" + std::string(ns) + "'");
    }
    const auto& space = it->second;
    const auto d = impl_->dimension.value_or(0);
    if (probe.size() != d) {
        raise(ErrorCode::DimensionMismatch, "probe has " + std::to_string(probe.size()) +
                                                " components, namespace dimension is " +
                                                std::to_string(d));
    }
    const double probe_norm = checked_norm(probe);

    struct Scored {
        double distance;
        std::size_t index;
    };
    std::vector<Scored> scored;
    scored.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto row = space.row(i, d);
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            dot += static_cast<double>(probe[j]) * static_cast<double>(row[j]);
        }
        const double dist = std::clamp(1.0 - dot / (probe_norm * space.norms[i]), 0.0, 2.0);
        scored.push_back({dist, i});
    }
    const auto k = std::min(top_k, scored.size());
    auto before = [&](const Scored& a, const Scored& b) {
        if (a.distance != b.distance) {
            return a.distance < b.distance;
        }
        return space.ids[a.index] < space.ids[b.index];
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                      before);

    std::vector<QueryResult> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto idx = scored[i].index;
        out.push_back({space.ids[idx], scored[i].distance, space.metadata[idx]});
    }
    return out;
}

NamespaceStats VectorStore::stats(std::string_view ns) const {
    impl_->sync_for_read(ns);
    std::shared_lock data(impl_->data_mutex);
    auto it = impl_->namespaces.find(ns);
    if (it == impl_->namespaces.end()) {
        raise(ErrorCode::UnknownNamespace, "no namespace '" + std::string(ns) + "'");
    }
    return {it->second.size(), impl_->dimension.value_or(0)};
}

StoreManifest VectorStore::manifest() const {
    impl_->sync_all_for_read();
    std::shared_lock data(impl_->data_mutex);
    return impl_->manifest_unlocked();
}

std::uint64_t VectorStore::total_count() const {
    impl_->sync_all_for_read();
    std::shared_lock data(impl_->data_mutex);
    std::uint64_t n = 0;
    for (const auto& [_, ns] : impl_->namespaces) {
        n += ns.size();
    }
    return n;
}

StoreManifest VectorStore::persist(const fs::path& dir) const {
    auto& impl = *impl_;
    if (impl.dir && fs::exists(dir) && fs::equivalent(*impl.dir, dir)) {
        const_cast<VectorStore*>(this)->compact();
        return manifest();
    }
    impl.sync_all_for_read();
    fs::create_directories(dir);
    LockFile lock(dir / ".lock");
    std::unique_lock flock(lock);
    std::shared_lock data(impl.data_mutex);
    const auto m = impl.manifest_unlocked();
    for (const auto& name : namespaces_on_disk(dir)) {
        fs::remove(dir / (name + std::string(kSnapshotExt)));
        fs::remove(dir / (name + std::string(kLogExt)));
    }
    for (const auto& [name, ns] : impl.namespaces) {
        impl.write_snapshot(dir / (name + std::string(kSnapshotExt)), ns);
    }
    write_manifest(dir, m);
    return m;
}

void VectorStore::compact() {
    auto& impl = *impl_;
    if (!impl.dir) {
        raise(ErrorCode::InvalidArgument, "compact() requires a store attached to a directory");
    }
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    impl.sync_all_locked();
    std::shared_lock data(impl.data_mutex);
    for (const auto& [name, ns] : impl.namespaces) {
        impl.write_snapshot(impl.snapshot_path(name), ns);
        const auto header = codec::encode_log_header(impl.dimension.value_or(0));
        write_file_atomic(impl.log_path(name), header);
        auto& st = impl.files[name];
        st.snapshot = file_identity(impl.snapshot_path(name));
        st.log = file_identity(impl.log_path(name));
        st.log_offset = header.size();
    }
    write_manifest(*impl.dir, impl.manifest_unlocked());
}

void VectorStore::refresh() const { impl_->sync_all_for_read(); }

}  // namespace unvd::vectors
