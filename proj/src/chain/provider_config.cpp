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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <thread>

#include "unvd/chain/provider.hpp"
#include "unvd/common/error.hpp"

namespace unvd::chain {

std::string_view to_string(ProviderKind k) {
    switch (k) {
    case ProviderKind::fixture: return "fixture";
    case ProviderKind::subgraph: return "subgraph";
    case ProviderKind::nft_api: return "nft_api";
    }
    return "fixture";
}

std::optional<ProviderKind> parse_provider_kind(std::string_view s) {
    for (auto k : {ProviderKind::fixture, ProviderKind::subgraph, ProviderKind::nft_api}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

Millis RetryPolicy::delay_after(std::uint32_t attempt) const {
    const double scaled = static_cast<double>(backoff_base.count()) *
                          std::pow(backoff_factor, static_cast<double>(attempt > 0 ? attempt - 1 : 0));
    return Millis(static_cast<std::int64_t>(std::min(scaled, static_cast<double>(backoff_cap.count()))));
}

ProviderConfig::ProviderConfig(ProviderKind k, std::string ep, std::uint32_t ps)
    : kind(k), endpoint(std::move(ep)), page_size(ps) {
    validate();
}

void ProviderConfig::validate() const {
    if (page_size < 10 || page_size > 100) {
        raise(ErrorCode::InvalidConfig,
              "page_size " + std::to_string(page_size) + " is outside [10, 100]");
    }
    if (endpoint.empty()) {
        raise(ErrorCode::InvalidConfig, "provider endpoint is empty");
    }
    if (timeout.count() <= 0) {
        raise(ErrorCode::InvalidConfig, "provider timeout must be positive");
    }
    if (retry.max_attempts < 1 || retry.backoff_base.count() < 0 || retry.backoff_factor < 1.0) {
        raise(ErrorCode::InvalidConfig, "retry policy needs max_attempts >= 1 and a non-shrinking backoff");
    }
    if (!(requests_per_second > 0)) {
        raise(ErrorCode::InvalidConfig, "requests_per_second must be positive");
    }
    if (!meta::is_valid_chain(chain)) {
        raise(ErrorCode::InvalidConfig, "invalid chain '" + chain + "'");
    }
}

SplitProvider::SplitProvider(std::shared_ptr<ChainProvider> contracts, std::shared_ptr<ChainProvider> nfts)
    : contracts_(std::move(contracts)), nfts_(std::move(nfts)) {}

ContractPage SplitProvider::list_contracts(std::string_view cursor) {
    return contracts_->list_contracts(cursor);
}

std::vector<NftEntry> SplitProvider::list_nfts(std::string_view contract_address) {
    return nfts_->list_nfts(contract_address);
}

std::size_t parse_offset_cursor(std::string_view cursor) {
    if (cursor.empty()) {
        return 0;
    }
    constexpr std::string_view prefix = "offset:";
    std::size_t offset = 0;
    if (cursor.substr(0, prefix.size()) != prefix || cursor.size() == prefix.size()) {
        raise(ErrorCode::BadCursor, "cursor '" + std::string(cursor) + "' is not offset:N");
    }
    const auto digits = cursor.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), offset);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        raise(ErrorCode::BadCursor, "cursor '" + std::string(cursor) + "' is not offset:N");
    }
    return offset;
}

std::string make_offset_cursor(std::size_t offset) { return "offset:" + std::to_string(offset); }

Sleeper real_sleeper() {
    return [](Millis d) { std::this_thread::sleep_for(d); };
}

RateLimiter::RateLimiter(double rps)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / rps))),
      next_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_);
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

bool is_transient(const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (err == nullptr) {
        return false;
    }
    switch (err->code()) {
    case ErrorCode::FetchTimeout:
    case ErrorCode::ProviderUnavailable: return true;
    case ErrorCode::HttpError: return err->detail() == 429 || err->detail() >= 500;
    default: return false;
    }
}

void with_retry(const RetryPolicy& policy, const Sleeper& sleep, const std::function<void()>& fn) {
    for (std::uint32_t attempt = 1;; ++attempt) {
        try {
            fn();
            return;
        } catch (const Error& e) {
            if (!is_transient(e)) {
                throw;
            }
            if (attempt >= policy.max_attempts) {
                raise(ErrorCode::ProviderUnavailable,
                      "gave up after " + std::to_string(attempt) + " attempts: " + e.what(),
                      e.detail());
            }
        }
        sleep(policy.delay_after(attempt));
    }
}

}  // namespace unvd::chain
