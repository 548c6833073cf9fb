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

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unvd/meta/records.hpp"

namespace unvd::chain {

using Millis = std::chrono::milliseconds;

enum class ProviderKind { fixture, subgraph, nft_api };

std::string_view to_string(ProviderKind k);
std::optional<ProviderKind> parse_provider_kind(std::string_view s);

struct RetryPolicy {
    std::uint32_t max_attempts = 3;
    Millis backoff_base{200};
    double backoff_factor = 2.0;
    Millis backoff_cap{5000};

    /// Delay before attempt `attempt` + 1 (attempt counts from 1).
    Millis delay_after(std::uint32_t attempt) const;
};

/// Validated at construction: page_size outside [10, 100], an empty endpoint,
/// or a non-positive timeout raise InvalidConfig.
struct ProviderConfig {
    ProviderConfig(ProviderKind kind, std::string endpoint, std::uint32_t page_size = 100);

    ProviderKind kind;
    std::string endpoint;  // fixture directory, or base URL for remote kinds
    std::uint32_t page_size;
    Millis timeout{10000};
    RetryPolicy retry;
    double requests_per_second = 10.0;
    std::string chain{meta::kDefaultChain};
    std::string api_key;

    void validate() const;
};

struct ContractPage {
    std::vector<meta::ContractRecord> contracts;
    /// nullopt once enumeration is complete.
    std::optional<std::string> next_cursor;
};

struct NftEntry {
    std::string contract_address;
    std::string token_id;
    std::string media_url;
    std::optional<std::string> metadata_url;
    std::string token_standard{meta::kErc721};

    bool operator==(const NftEntry&) const = default;
};

/// Source of contracts and tokens. Implementations are safe for concurrent use.
class ChainProvider {
public:
    virtual ~ChainProvider() = default;
    virtual const ProviderConfig& config() const = 0;
    /// `cursor` is empty for the first page. Throws BadCursor,
    /// ProviderUnavailable.
    virtual ContractPage list_contracts(std::string_view cursor) = 0;
    /// Throws UnknownContract, ProviderUnavailable.
    virtual std::vector<NftEntry> list_nfts(std::string_view contract_address) = 0;
};

/// Enumerates contracts with one provider and tokens with another, the way
/// a subgraph is used for discovery and a cached NFT API for token lists.
class SplitProvider final : public ChainProvider {
public:
    SplitProvider(std::shared_ptr<ChainProvider> contracts, std::shared_ptr<ChainProvider> nfts);
    const ProviderConfig& config() const override { return nfts_->config(); }
    ContractPage list_contracts(std::string_view cursor) override;
    std::vector<NftEntry> list_nfts(std::string_view contract_address) override;

private:
    std::shared_ptr<ChainProvider> contracts_;
    std::shared_ptr<ChainProvider> nfts_;
};

/// "offset:N" cursors shared by the built-in providers.
std::size_t parse_offset_cursor(std::string_view cursor);
std::string make_offset_cursor(std::size_t offset);

using Sleeper = std::function<void(Millis)>;
Sleeper real_sleeper();

/// Spaces calls at least 1/rps apart. Thread-safe.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_second);
    void acquire();

private:
    std::mutex mutex_;
    std::chrono::steady_clock::duration interval_;
    std::chrono::steady_clock::time_point next_;
};

/// True for errors worth another attempt: timeouts, unavailability, HTTP 429
/// and 5xx.
bool is_transient(const std::exception& e);

/// Runs `fn` up to policy.max_attempts times while it throws transient
/// errors, sleeping delay_after(k) between attempts. The final transient
/// failure is rethrown as ProviderUnavailable; other errors propagate at once.
void with_retry(const RetryPolicy& policy, const Sleeper& sleep, const std::function<void()>& fn);

template <typename T>
T with_retry(const RetryPolicy& policy, const Sleeper& sleep, const std::function<T()>& fn) {
    std::optional<T> out;
    with_retry(policy, sleep, [&] { out = fn(); });
    return std::move(*out);
}

}  // namespace unvd::chain
