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

#include "unvd/meta/metadata_store.hpp"

#include <array>
#include <charconv>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <unordered_map>

#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/vectors/vector_store.hpp"

namespace fs = std::filesystem;

namespace unvd::meta {

namespace {

enum Table : std::size_t { kContracts = 0, kNfts = 1, kTasks = 2 };
constexpr std::array<std::string_view, 3> kFileNames{"contracts.ndjson", "nfts.ndjson",
                                                     "tasks.ndjson"};

struct FileTrack {
    std::optional<FileIdentity> id;
    std::uint64_t offset = 0;
};

void check_limit(std::size_t limit) {
    if (limit < 1 || limit > 1000) {
        raise(ErrorCode::InvalidArgument, "limit must be within [1, 1000]");
    }
}

std::string encode_task_cursor(const TaskRecord& t) {
    return std::to_string(t.created_at) + ":" + t.task_id;
}

std::pair<std::int64_t, std::string> decode_task_cursor(std::string_view cursor) {
    const auto colon = cursor.find(':');
    std::int64_t created = 0;
    if (colon == std::string_view::npos || colon + 1 >= cursor.size()) {
        raise(ErrorCode::BadCursor, "malformed task cursor");
    }
    const auto [ptr, ec] = std::from_chars(cursor.data(), cursor.data() + colon, created);
    if (ec != std::errc() || ptr != cursor.data() + colon) {
        raise(ErrorCode::BadCursor, "malformed task cursor");
    }
    return {created, std::string(cursor.substr(colon + 1))};
}

}  // namespace

struct MetadataStore::Impl {
    std::shared_ptr<Clock> clock;

    std::map<std::pair<std::string, std::string>, ContractRecord> contracts;
    std::map<NftKey, NftRecord, NftKeyLess> nfts;
    std::map<std::string, TaskRecord, std::less<>> tasks;
    std::set<std::pair<std::int64_t, std::string>> task_order;
    std::unordered_map<std::string, std::vector<std::string>> tasks_by_subject;
    mutable std::shared_mutex data_mutex;

    std::optional<fs::path> dir;
    std::unique_ptr<LockFile> lock;
    std::mutex io_mutex;
    std::array<FileTrack, 3> tracks;

    fs::path path(Table t) const { return *dir / kFileNames[t]; }

    // --- in-memory application (caller holds data_mutex exclusively) ------

    void apply(Table t, const nlohmann::json& j) {
        switch (t) {
        case kContracts: {
            auto rec = j.get<ContractRecord>();
            contracts.insert_or_assign({rec.chain, rec.address}, std::move(rec));
            break;
        }
        case kNfts: {
            auto rec = j.get<NftRecord>();
            auto key = rec.key();
            nfts.insert_or_assign(std::move(key), std::move(rec));
            break;
        }
        case kTasks: apply_task(j.get<TaskRecord>()); break;
        }
    }

    void apply_task(TaskRecord rec) {
        auto it = tasks.find(rec.task_id);
        if (it == tasks.end()) {
            task_order.emplace(rec.created_at, rec.task_id);
            tasks_by_subject[rec.subject()].push_back(rec.task_id);
            tasks.emplace(rec.task_id, std::move(rec));
            return;
        }
        if (it->second.created_at != rec.created_at) {
            task_order.erase({it->second.created_at, rec.task_id});
            task_order.emplace(rec.created_at, rec.task_id);
        }
        it->second = std::move(rec);
    }

    void clear(Table t) {
        switch (t) {
        case kContracts: contracts.clear(); break;
        case kNfts: nfts.clear(); break;
        case kTasks:
            tasks.clear();
            task_order.clear();
            tasks_by_subject.clear();
            break;
        }
    }

    // --- disk sync --------------------------------------------------------

    /// Parses complete lines of `bytes` (which begins at absolute `base`).
    std::vector<nlohmann::json> parse_lines(Table t, std::string_view bytes, std::uint64_t base) {
        std::vector<nlohmann::json> out;
        std::size_t pos = 0;
        while (pos < bytes.size()) {
            const auto nl = bytes.find('\n', pos);
            if (nl == std::string_view::npos) {
                raise(ErrorCode::CorruptFile,
                      std::string(kFileNames[t]) + ": unterminated record at byte offset " +
                          std::to_string(base + pos),
                      static_cast<std::int64_t>(base + pos));
            }
            const auto line = bytes.substr(pos, nl - pos);
            if (!line.empty()) {
                auto j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_discarded() || !j.is_object()) {
                    raise(ErrorCode::CorruptFile,
                          std::string(kFileNames[t]) + ": unparseable record at byte offset " +
                              std::to_string(base + pos),
                          static_cast<std::int64_t>(base + pos));
                }
                out.push_back(std::move(j));
            }
            pos = nl + 1;
        }
        return out;
    }

    void apply_all(Table t, const std::vector<nlohmann::json>& lines, std::uint64_t base) {
        std::unique_lock data(data_mutex);
        for (const auto& j : lines) {
            try {
                apply(t, j);
            } catch (const nlohmann::json::exception& e) {
                raise(ErrorCode::CorruptFile,
                      std::string(kFileNames[t]) + ": malformed record: " + e.what(),
                      static_cast<std::int64_t>(base));
            }
        }
    }

    bool needs_sync(Table t) const {
        const auto id = file_identity(path(t));
        const auto& tr = tracks[t];
        if (id.has_value() != tr.id.has_value()) {
            return true;
        }
        return id && (!id->same_file(*tr.id) || id->size != tr.offset);
    }

    void sync_locked(Table t) {
        const auto id = file_identity(path(t));
        auto& tr = tracks[t];
        if (!id) {
            if (tr.id) {
                std::unique_lock data(data_mutex);
                clear(t);
            }
            tr = FileTrack{};
            return;
        }
        const bool reload = !tr.id || !id->same_file(*tr.id) || id->size < tr.offset;
        if (reload) {
            const auto bytes = read_file(path(t));
            const auto lines = parse_lines(t, bytes, 0);
            {
                std::unique_lock data(data_mutex);
                clear(t);
            }
            apply_all(t, lines, 0);
            tr.id = id;
            tr.offset = bytes.size();
            return;
        }
        if (id->size > tr.offset) {
            const auto bytes = read_file_range(path(t), tr.offset, id->size - tr.offset);
            const auto lines = parse_lines(t, bytes, tr.offset);
            apply_all(t, lines, tr.offset);
            tr.offset += bytes.size();
        }
        tr.id = id;
        tr.id->size = tr.offset;
    }

    void sync_all_locked() {
        for (auto t : {kContracts, kNfts, kTasks}) {
            sync_locked(t);
        }
    }

    void sync_for_read() {
        if (!dir) {
            return;
        }
        std::lock_guard io(io_mutex);
        if (!needs_sync(kContracts) && !needs_sync(kNfts) && !needs_sync(kTasks)) {
            return;
        }
        std::shared_lock flock(*lock);
        sync_all_locked();
    }

    /// Runs `fn` with every table current and writers excluded across
    /// processes. `fn` returns the lines to persist (table, record) and applies
    /// nothing itself.
    template <typename Fn>
    auto write(Fn&& fn) {
        if (!dir) {
            std::unique_lock data(data_mutex);
            return fn(data);
        }
        std::lock_guard io(io_mutex);
        std::unique_lock flock(*lock);
        sync_all_locked();
        std::unique_lock data(data_mutex);
        return fn(data);
    }

    /// Appends a record line (attached) and applies it. Caller holds data_mutex
    /// and, when attached, the exclusive file lock.
    template <typename Record>
    void commit(Table t, const Record& rec) {
        const nlohmann::json j = rec;
        if (dir) {
            const auto line = j.dump() + "\n";
            AppendFile out(path(t));
            out.append(line);
            auto& tr = tracks[t];
            tr.offset += line.size();
            tr.id = file_identity(path(t));
            if (tr.id) {
                tr.id->size = tr.offset;
            }
        }
        apply(t, j);
    }
};

MetadataStore::MetadataStore(std::shared_ptr<Clock> clock) : impl_(std::make_unique<Impl>()) {
    impl_->clock = std::move(clock);
}

MetadataStore::~MetadataStore() = default;
MetadataStore::MetadataStore(MetadataStore&&) noexcept = default;
MetadataStore& MetadataStore::operator=(MetadataStore&&) noexcept = default;

MetadataStore MetadataStore::open(const fs::path& dir, std::shared_ptr<Clock> clock) {
    fs::create_directories(dir);
    MetadataStore store(std::move(clock));
    auto& impl = *store.impl_;
    impl.dir = dir;
    impl.lock = std::make_unique<LockFile>(dir / ".meta.lock");
    std::lock_guard io(impl.io_mutex);
    std::shared_lock flock(*impl.lock);
    impl.sync_all_locked();
    return store;
}

const Clock& MetadataStore::clock() const { return *impl_->clock; }

void MetadataStore::put_contract(ContractRecord rec) {
    validate(rec);
    if (rec.discovered_at == 0) {
        rec.discovered_at = impl_->clock->now_ms();
    }
    impl_->write([&](auto&) { impl_->commit(kContracts, rec); });
}

std::optional<ContractRecord> MetadataStore::get_contract(std::string_view chain,
                                                          std::string_view address) const {
    impl_->sync_for_read();
    std::shared_lock data(impl_->data_mutex);
    auto it = impl_->contracts.find({std::string(chain), std::string(address)});
    if (it == impl_->contracts.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<ContractRecord> MetadataStore::list_contracts() const {
    impl_->sync_for_read();
    std::shared_lock data(impl_->data_mutex);
    std::vector<ContractRecord> out;
    out.reserve(impl_->contracts.size());
    for (const auto& [_, rec] : impl_->contracts) {
        out.push_back(rec);
    }
    return out;
}

void MetadataStore::put_nft(NftRecord rec) {
    validate(rec);
    rec.updated_at = impl_->clock->now_ms();
    impl_->write([&](auto&) { impl_->commit(kNfts, rec); });
}

std::optional<NftRecord> MetadataStore::get_nft(const NftKey& key) const {
    impl_->sync_for_read();
    std::shared_lock data(impl_->data_mutex);
    auto it = impl_->nfts.find(key);
    if (it == impl_->nfts.end()) {
        return std::nullopt;
    }
    return it->second;
}

NftPage MetadataStore::list_nfts_by_contract(std::string_view chain, std::string_view address,
                                             std::string_view cursor, std::size_t limit) const {
    check_limit(limit);
    if (!cursor.empty() && !is_valid_token_id(cursor)) {
        raise(ErrorCode::BadCursor, "cursor '" + std::string(cursor) + "' is not a token id");
    }
    impl_->sync_for_read();
    std::shared_lock data(impl_->data_mutex);
    if (impl_->contracts.count({std::string(chain), std::string(address)}) == 0) {
        raise(ErrorCode::UnknownContract, "no contract " + std::string(chain) + ":" +
                                              std::string(address));
    }
    NftKey start{std::string(chain), std::string(address), cursor.empty() ? "0" : std::string(cursor)};
    auto it = impl_->nfts.lower_bound(start);
    if (!cursor.empty() && it != impl_->nfts.end() && it->first == start) {
        ++it;
    }
    NftPage page;
    for (; it != impl_->nfts.end(); ++it) {
        if (it->first.chain != chain || it->first.contract_address != address) {
            break;
        }
        if (page.items.size() == limit) {
            page.next_cursor = page.items.back().token_id;
            break;
        }
        page.items.push_back(it->second);
    }
    return page;
}

CreateOutcome MetadataStore::create_task(TaskRecord rec) {
    validate(rec);
    return impl_->write([&](auto&) {
        auto& impl = *impl_;
        if (impl.tasks.count(rec.task_id) != 0) {
            raise(ErrorCode::InvalidArgument, "task id '" + rec.task_id + "' already exists");
        }
        if (auto sit = impl.tasks_by_subject.find(rec.subject()); sit != impl.tasks_by_subject.end()) {
            for (const auto& id : sit->second) {
                const auto& existing = impl.tasks.at(id);
                const bool active = !is_terminal(existing.status);
                const bool same_parent = !rec.parent_id.empty() && existing.parent_id == rec.parent_id;
                if (active || same_parent) {
                    return CreateOutcome{existing, false};
                }
            }
        }
        const auto now = impl.clock->now_ms();
        rec.status = TaskStatus::pending;
        rec.attempts = 0;
        rec.created_at = now;
        rec.updated_at = now;
        rec.history = {{TaskStatus::pending, now}};
        impl.commit(kTasks, rec);
        return CreateOutcome{rec, true};
    });
}

std::optional<TaskRecord> MetadataStore::get_task(std::string_view task_id) const {
    impl_->sync_for_read();
    std::shared_lock data(impl_->data_mutex);
    auto it = impl_->tasks.find(task_id);
    if (it == impl_->tasks.end()) {
        return std::nullopt;
    }
    return it->second;
}

TaskRecord MetadataStore::transition_task(std::string_view task_id, TaskStatus to,
                                          std::optional<std::string> error) {
    return impl_->write([&](auto&) {
        auto& impl = *impl_;
        auto it = impl.tasks.find(task_id);
        if (it == impl.tasks.end()) {
            raise(ErrorCode::UnknownTask, "no task '" + std::string(task_id) + "'");
        }
        if (!is_legal_transition(it->second.status, to)) {
            raise(ErrorCode::IllegalTransition, "task " + std::string(task_id) + ": " +
                                                    std::string(to_string(it->second.status)) +
                                                    " -> " + std::string(to_string(to)));
        }
        TaskRecord next = it->second;
        const auto now = impl.clock->now_ms();
        next.status = to;
        if (to == TaskStatus::processing) {
            ++next.attempts;
        }
        if (error) {
            next.last_error = std::move(error);
        }
        next.updated_at = now;
        next.history.push_back({to, now});
        impl.commit(kTasks, next);
        return next;
    });
}

TaskPage MetadataStore::list_tasks(std::optional<TaskStatus> status, std::string_view cursor,
                                   std::size_t limit) const {
    check_limit(limit);
    std::optional<std::pair<std::int64_t, std::string>> after;
    if (!cursor.empty()) {
        after = decode_task_cursor(cursor);
    }
    impl_->sync_for_read();
    std::shared_lock data(impl_->data_mutex);
    const auto& order = impl_->task_order;
    auto it = after ? order.upper_bound(*after) : order.begin();
    TaskPage page;
    for (; it != order.end(); ++it) {
        const auto& task = impl_->tasks.at(it->second);
        if (status && task.status != *status) {
            continue;
        }
        if (page.items.size() == limit) {
            page.next_cursor = encode_task_cursor(page.items.back());
            break;
        }
        page.items.push_back(task);
    }
    return page;
}

std::vector<TaskRecord> MetadataStore::tasks_for_subject(std::string_view subject) const {
    impl_->sync_for_read();
    std::shared_lock data(impl_->data_mutex);
    std::vector<TaskRecord> out;
    if (auto it = impl_->tasks_by_subject.find(std::string(subject));
        it != impl_->tasks_by_subject.end()) {
        for (const auto& id : it->second) {
            out.push_back(impl_->tasks.at(id));
        }
    }
    return out;
}

AnalyticsSummary MetadataStore::analytics_summary(const vectors::VectorStore* vectors) const {
    impl_->sync_for_read();
    AnalyticsSummary s;
    for (auto st : {NftStatus::discovered, NftStatus::embedded, NftStatus::failed}) {
        s.nfts[std::string(to_string(st))] = 0;
    }
    for (auto st : {TaskStatus::pending, TaskStatus::processing, TaskStatus::done, TaskStatus::failed}) {
        s.tasks[std::string(to_string(st))] = 0;
    }
    {
        std::shared_lock data(impl_->data_mutex);
        s.contracts = impl_->contracts.size();
        for (const auto& [_, n] : impl_->nfts) {
            ++s.nfts[std::string(to_string(n.status))];
        }
        for (const auto& [_, t] : impl_->tasks) {
            ++s.tasks[std::string(to_string(t.status))];
        }
    }
    if (vectors != nullptr) {
        s.vectors = vectors->total_count();
    }
    return s;
}

void MetadataStore::compact() {
    auto& impl = *impl_;
    if (!impl.dir) {
        raise(ErrorCode::InvalidArgument, "compact() requires a store attached to a directory");
    }
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    impl.sync_all_locked();
    std::shared_lock data(impl.data_mutex);
    auto rewrite = [&](Table t, const auto& records) {
        std::string text;
        for (const auto& r : records) {
            text += nlohmann::json(r).dump();
            text += '\n';
        }
        write_file_atomic(impl.path(t), text);
        impl.tracks[t].id = file_identity(impl.path(t));
        impl.tracks[t].offset = text.size();
    };
    std::vector<ContractRecord> cs;
    for (const auto& [_, r] : impl.contracts) {
        cs.push_back(r);
    }
    std::vector<NftRecord> ns;
    for (const auto& [_, r] : impl.nfts) {
        ns.push_back(r);
    }
    std::vector<TaskRecord> ts;
    for (const auto& [_, id] : impl.task_order) {
        ts.push_back(impl.tasks.at(id));
    }
    rewrite(kContracts, cs);
    rewrite(kNfts, ns);
    rewrite(kTasks, ts);
}

void MetadataStore::refresh() const { impl_->sync_for_read(); }

}  // namespace unvd::meta
