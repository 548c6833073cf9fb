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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace unvd::meta {

inline constexpr std::string_view kDefaultChain = "ethereum";
inline constexpr std::string_view kErc721 = "ERC-721";

enum class NftStatus { discovered, embedded, failed };
enum class TaskKind { contract, nft };
enum class TaskStatus { pending, processing, done, failed };

std::string_view to_string(NftStatus s);
std::string_view to_string(TaskKind k);
std::string_view to_string(TaskStatus s);
std::optional<NftStatus> parse_nft_status(std::string_view s);
std::optional<TaskKind> parse_task_kind(std::string_view s);
std::optional<TaskStatus> parse_task_status(std::string_view s);

inline bool is_terminal(TaskStatus s) { return s == TaskStatus::done || s == TaskStatus::failed; }
/// pending->processing, processing->done|failed, failed->pending.
bool is_legal_transition(TaskStatus from, TaskStatus to);

/// ^0x[0-9a-f]{40}$
bool is_valid_address(std::string_view address);
/// Canonical decimal in [0, 2^256).
bool is_valid_token_id(std::string_view token_id);
bool is_valid_chain(std::string_view chain);
/// Orders canonical decimal strings numerically.
int compare_token_ids(std::string_view a, std::string_view b);

/// "{chain}:{contract}:{token_id}"
std::string make_vector_id(std::string_view chain, std::string_view contract,
                           std::string_view token_id);

struct ContractRecord {
    std::string chain{kDefaultChain};
    std::string address;
    std::optional<std::string> name;
    std::string token_standard{kErc721};
    std::int64_t discovered_at = 0;

    bool operator==(const ContractRecord&) const = default;
};

struct NftKey {
    std::string chain;
    std::string contract_address;
    std::string token_id;

    bool operator==(const NftKey&) const = default;
};

/// Orders by chain, contract, then token id numerically.
struct NftKeyLess {
    bool operator()(const NftKey& a, const NftKey& b) const;
};

struct NftRecord {
    std::string chain{kDefaultChain};
    std::string contract_address;
    std::string token_id;
    std::string media_url;
    std::optional<std::string> metadata_url;
    std::string token_standard{kErc721};
    std::string vector_id;
    NftStatus status = NftStatus::discovered;
    std::optional<std::string> last_error;
    std::int64_t updated_at = 0;

    NftKey key() const { return {chain, contract_address, token_id}; }
    bool operator==(const NftRecord&) const = default;
};

struct TaskTransition {
    TaskStatus status = TaskStatus::pending;
    std::int64_t at = 0;

    bool operator==(const TaskTransition&) const = default;
};

struct TaskRecord {
    std::string task_id;
    TaskKind kind = TaskKind::contract;
    std::string chain{kDefaultChain};
    std::string address;
    std::optional<std::string> token_id;  // nft tasks
    std::string parent_id;                // contract task that spawned an nft task
    TaskStatus status = TaskStatus::pending;
    std::uint32_t attempts = 0;
    std::optional<std::string> last_error;
    std::int64_t created_at = 0;
    std::int64_t updated_at = 0;
    std::vector<TaskTransition> history;

    /// Identifies what the task works on: kind, chain, address and token.
    std::string subject() const;
    bool operator==(const TaskRecord&) const = default;
};

/// Raise SchemaViolation if the record breaks its type invariants.
void validate(const ContractRecord& rec);
void validate(const NftRecord& rec);
void validate(const TaskRecord& rec);

void to_json(nlohmann::json& j, const ContractRecord& r);
void from_json(const nlohmann::json& j, ContractRecord& r);
void to_json(nlohmann::json& j, const NftRecord& r);
void from_json(const nlohmann::json& j, NftRecord& r);
void to_json(nlohmann::json& j, const TaskRecord& r);
void from_json(const nlohmann::json& j, TaskRecord& r);

}  // namespace unvd::meta
