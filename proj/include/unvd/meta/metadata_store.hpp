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
#include <string>
#include <string_view>
#include <vector>

#include "unvd/common/clock.hpp"
#include "unvd/meta/records.hpp"

namespace unvd::vectors {
class VectorStore;
}

namespace unvd::meta {

struct NftPage {
    std::vector<NftRecord> items;
    /// Empty when the listing is exhausted.
    std::optional<std::string> next_cursor;
};

struct TaskPage {
    std::vector<TaskRecord> items;
    std::optional<std::string> next_cursor;
};

struct CreateOutcome {
    TaskRecord task;
    bool created = false;
};

struct AnalyticsSummary {
    std::uint64_t contracts = 0;
    std::map<std::string, std::uint64_t> nfts;   // by NftStatus name, all present
    std::map<std::string, std::uint64_t> tasks;  // by TaskStatus name, all present
    std::uint64_t vectors = 0;
};

/// Keyed document store for contracts, NFTs and tasks.
///
/// In-memory, or attached to a data directory holding contracts.ndjson,
/// nfts.ndjson and tasks.ndjson. Each mutation appends the full record as one
/// line; the latest line for a key wins. compact() rewrites each file with a
/// single line per key. Like the vector store, several processes may attach
/// the same directory.
class MetadataStore {
public:
    explicit MetadataStore(std::shared_ptr<Clock> clock = system_clock());
    ~MetadataStore();
    MetadataStore(MetadataStore&&) noexcept;
    MetadataStore& operator=(MetadataStore&&) noexcept;

    static MetadataStore open(const std::filesystem::path& dir,
                              std::shared_ptr<Clock> clock = system_clock());

    const Clock& clock() const;

    // contracts
    void put_contract(ContractRecord rec);
    std::optional<ContractRecord> get_contract(std::string_view chain, std::string_view address) const;
    std::vector<ContractRecord> list_contracts() const;

    // nfts
    void put_nft(NftRecord rec);
    std::optional<NftRecord> get_nft(const NftKey& key) const;
    /// Token-id ascending. `cursor` is empty to start or a previous next_cursor.
    /// 1 <= limit <= 1000. Throws UnknownContract, BadCursor, InvalidArgument.
    NftPage list_nfts_by_contract(std::string_view chain, std::string_view address,
                                  std::string_view cursor, std::size_t limit) const;

    // tasks
    /// Inserts a pending task unless one for the same subject is still
    /// non-terminal, or was already spawned by the same parent; in that case
    /// the existing task is returned with created == false.
    CreateOutcome create_task(TaskRecord rec);
    std::optional<TaskRecord> get_task(std::string_view task_id) const;
    /// Applies one legal status transition. Entering processing increments
    /// attempts; `error` sets last_error (kept otherwise). Throws UnknownTask or
    /// IllegalTransition without mutating anything.
    TaskRecord transition_task(std::string_view task_id, TaskStatus to,
                               std::optional<std::string> error = std::nullopt);
    /// Creation order; optional status filter; 1 <= limit <= 1000.
    TaskPage list_tasks(std::optional<TaskStatus> status, std::string_view cursor,
                        std::size_t limit) const;
    std::vector<TaskRecord> tasks_for_subject(std::string_view subject) const;

    AnalyticsSummary analytics_summary(const vectors::VectorStore* vectors = nullptr) const;

    /// Attached stores only.
    void compact();
    void refresh() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace unvd::meta
