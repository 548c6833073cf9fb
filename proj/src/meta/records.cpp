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

#include "unvd/meta/records.hpp"

#include <algorithm>
#include <array>

#include "unvd/common/clock.hpp"
#include "unvd/common/error.hpp"

namespace unvd::meta {

namespace {

// 2^256 - 1
constexpr std::string_view kMaxTokenId =
    "115792089237316195423570985008687907853269984665640564039457584007913129639935";

[[noreturn]] void schema(const std::string& msg) { raise(ErrorCode::SchemaViolation, msg); }

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [e, name] : table) {
        if (name == s) {
            return e;
        }
    }
    return std::nullopt;
}

constexpr std::array<std::pair<NftStatus, std::string_view>, 3> kNftStatus{{
    {NftStatus::discovered, "discovered"},
    {NftStatus::embedded, "embedded"},
    {NftStatus::failed, "failed"},
}};
constexpr std::array<std::pair<TaskKind, std::string_view>, 2> kTaskKind{{
    {TaskKind::contract, "contract"},
    {TaskKind::nft, "nft"},
}};
constexpr std::array<std::pair<TaskStatus, std::string_view>, 4> kTaskStatus{{
    {TaskStatus::pending, "pending"},
    {TaskStatus::processing, "processing"},
    {TaskStatus::done, "done"},
    {TaskStatus::failed, "failed"},
}};

std::string time_text(std::int64_t ms) { return format_utc(ms); }

std::int64_t time_value(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return 0;
    }
    const auto parsed = parse_utc(j.at(key).get<std::string>());
    if (!parsed) {
        schema(std::string("bad timestamp in field ") + key);
    }
    return *parsed;
}

template <typename T>
std::optional<T> opt(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<T>();
}

nlohmann::json opt_json(const std::optional<std::string>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view to_string(NftStatus s) { return kNftStatus[static_cast<std::size_t>(s)].second; }
std::string_view to_string(TaskKind k) { return kTaskKind[static_cast<std::size_t>(k)].second; }
std::string_view to_string(TaskStatus s) { return kTaskStatus[static_cast<std::size_t>(s)].second; }
std::optional<NftStatus> parse_nft_status(std::string_view s) { return parse_enum(s, kNftStatus); }
std::optional<TaskKind> parse_task_kind(std::string_view s) { return parse_enum(s, kTaskKind); }
std::optional<TaskStatus> parse_task_status(std::string_view s) { return parse_enum(s, kTaskStatus); }

bool is_legal_transition(TaskStatus from, TaskStatus to) {
    switch (from) {
    case TaskStatus::pending: return to == TaskStatus::processing;
    case TaskStatus::processing: return to == TaskStatus::done || to == TaskStatus::failed;
    case TaskStatus::failed: return to == TaskStatus::pending;
    case TaskStatus::done: return false;
    }
    return false;
}

bool is_valid_address(std::string_view a) {
    if (a.size() != 42 || a[0] != '0' || a[1] != 'x') {
        return false;
    }
    return std::all_of(a.begin() + 2, a.end(),
                       [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

bool is_valid_token_id(std::string_view t) {
    if (t.empty() || t.size() > kMaxTokenId.size()) {
        return false;
    }
    if (!std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return false;
    }
    if (t.size() > 1 && t[0] == '0') {
        return false;
    }
    return t.size() < kMaxTokenId.size() || t <= kMaxTokenId;
}

bool is_valid_chain(std::string_view c) {
    return !c.empty() && c.size() <= 32 && std::all_of(c.begin(), c.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '-';
    });
}

int compare_token_ids(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) {
        return a.size() < b.size() ? -1 : 1;
    }
    const int c = a.compare(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::string make_vector_id(std::string_view chain, std::string_view contract,
                           std::string_view token_id) {
    std::string id;
    id.reserve(chain.size() + contract.size() + token_id.size() + 2);
    id.append(chain).append(":").append(contract).append(":").append(token_id);
    return id;
}

bool NftKeyLess::operator()(const NftKey& a, const NftKey& b) const {
    if (a.chain != b.chain) {
        return a.chain < b.chain;
    }
    if (a.contract_address != b.contract_address) {
        return a.contract_address < b.contract_address;
    }
    return compare_token_ids(a.token_id, b.token_id) < 0;
}

std::string TaskRecord::subject() const {
    std::string s(to_string(kind));
    s.append(":").append(chain).append(":").append(address);
    if (token_id) {
        s.append(":").append(*token_id);
    }
    return s;
}

void validate(const ContractRecord& r) {
    if (!is_valid_chain(r.chain)) {
        schema("invalid chain '" + r.chain + "'");
    }
    if (!is_valid_address(r.address)) {
        schema("contract address '" + r.address + "' must match ^0x[0-9a-f]{40}$");
    }
    if (r.token_standard != kErc721) {
        schema("unsupported token standard '" + r.token_standard + "'");
    }
}

void validate(const NftRecord& r) {
    if (!is_valid_chain(r.chain)) {
        schema("invalid chain '" + r.chain + "'");
    }
    if (!is_valid_address(r.contract_address)) {
        schema("contract address '" + r.contract_address + "' must match ^0x[0-9a-f]{40}$");
    }
    if (!is_valid_token_id(r.token_id)) {
        schema("token id '" + r.token_id + "' is not a canonical decimal below 2^256");
    }
    if (r.media_url.empty()) {
        schema("media_url must be non-empty");
    }
    if (r.token_standard != kErc721) {
        schema("unsupported token standard '" + r.token_standard + "'");
    }
    if (r.vector_id != make_vector_id(r.chain, r.contract_address, r.token_id)) {
        schema("vector_id '" + r.vector_id + "' does not match its key fields");
    }
}

void validate(const TaskRecord& r) {
    if (r.task_id.empty()) {
        schema("task_id must be non-empty");
    }
    if (!is_valid_chain(r.chain)) {
        schema("invalid chain '" + r.chain + "'");
    }
    if (!is_valid_address(r.address)) {
        schema("task address '" + r.address + "' must match ^0x[0-9a-f]{40}$");
    }
    if (r.kind == TaskKind::nft) {
        if (!r.token_id || !is_valid_token_id(*r.token_id)) {
            schema("nft task needs a canonical token id");
        }
    } else if (r.token_id) {
        schema("contract task must not carry a token id");
    }
}

void to_json(nlohmann::json& j, const ContractRecord& r) {
    j = nlohmann::json{{"chain", r.chain},
                       {"address", r.address},
                       {"name", opt_json(r.name)},
                       {"token_standard", r.token_standard},
                       {"discovered_at", time_text(r.discovered_at)}};
}

void from_json(const nlohmann::json& j, ContractRecord& r) {
    r.chain = j.at("chain").get<std::string>();
    r.address = j.at("address").get<std::string>();
    r.name = opt<std::string>(j, "name");
    r.token_standard = j.at("token_standard").get<std::string>();
    r.discovered_at = time_value(j, "discovered_at");
}

void to_json(nlohmann::json& j, const NftRecord& r) {
    j = nlohmann::json{{"chain", r.chain},
                       {"contract_address", r.contract_address},
                       {"token_id", r.token_id},
                       {"media_url", r.media_url},
                       {"metadata_url", opt_json(r.metadata_url)},
                       {"token_standard", r.token_standard},
                       {"vector_id", r.vector_id},
                       {"status", to_string(r.status)},
                       {"last_error", opt_json(r.last_error)},
                       {"updated_at", time_text(r.updated_at)}};
}

void from_json(const nlohmann::json& j, NftRecord& r) {
    r.chain = j.at("chain").get<std::string>();
    r.contract_address = j.at("contract_address").get<std::string>();
    r.token_id = j.at("token_id").get<std::string>();
    r.media_url = j.at("media_url").get<std::string>();
    r.metadata_url = opt<std::string>(j, "metadata_url");
    r.token_standard = j.at("token_standard").get<std::string>();
    r.vector_id = j.at("vector_id").get<std::string>();
    const auto status = parse_nft_status(j.at("status").get<std::string>());
    if (!status) {
        schema("unknown nft status");
    }
    r.status = *status;
    r.last_error = opt<std::string>(j, "last_error");
    r.updated_at = time_value(j, "updated_at");
}

void to_json(nlohmann::json& j, const TaskRecord& r) {
    auto history = nlohmann::json::array();
    for (const auto& t : r.history) {
        history.push_back({{"status", to_string(t.status)}, {"at", time_text(t.at)}});
    }
    j = nlohmann::json{{"task_id", r.task_id},
                       {"kind", to_string(r.kind)},
                       {"chain", r.chain},
                       {"address", r.address},
                       {"token_id", opt_json(r.token_id)},
                       {"parent_id", r.parent_id},
                       {"status", to_string(r.status)},
                       {"attempts", r.attempts},
                       {"last_error", opt_json(r.last_error)},
                       {"created_at", time_text(r.created_at)},
                       {"updated_at", time_text(r.updated_at)},
                       {"history", history}};
}

void from_json(const nlohmann::json& j, TaskRecord& r) {
    r.task_id = j.at("task_id").get<std::string>();
    const auto kind = parse_task_kind(j.at("kind").get<std::string>());
    const auto status = parse_task_status(j.at("status").get<std::string>());
    if (!kind || !status) {
        schema("unknown task kind or status");
    }
    r.kind = *kind;
    r.status = *status;
    r.chain = j.at("chain").get<std::string>();
    r.address = j.at("address").get<std::string>();
    r.token_id = opt<std::string>(j, "token_id");
    r.parent_id = j.value("parent_id", std::string());
    r.attempts = j.at("attempts").get<std::uint32_t>();
    r.last_error = opt<std::string>(j, "last_error");
    r.created_at = time_value(j, "created_at");
    r.updated_at = time_value(j, "updated_at");
    r.history.clear();
    if (j.contains("history")) {
        for (const auto& h : j.at("history")) {
            const auto s = parse_task_status(h.at("status").get<std::string>());
            if (!s) {
                schema("unknown status in task history");
            }
            r.history.push_back({*s, time_value(h, "at")});
        }
    }
}

}  // namespace unvd::meta
