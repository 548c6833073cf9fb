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

#include <optional>
#include <string>

#include "unvd/chain/fixture_set.hpp"
#include "unvd/chain/provider.hpp"

namespace unvd::chain {

/// Synthetic response times. A list_contracts call costs per_page; a
/// list_nfts call costs per_page for each page_size-sized page of tokens
/// (at least one) plus per_token for each token.
struct FixtureLatency {
    Millis per_page{0};
    Millis per_token{0};
};

/// Serves a fixture directory. Contracts come back in address order, tokens
/// in numeric id order; lookups are map hits, so apart from the injected
/// latency a call costs O(page) or O(tokens).
class FixtureProvider final : public ChainProvider {
public:
    /// cfg.endpoint is the fixture directory.
    explicit FixtureProvider(ProviderConfig cfg, FixtureLatency latency = {});
    FixtureProvider(ProviderConfig cfg, FixtureSet set, FixtureLatency latency = {});

    const ProviderConfig& config() const override { return cfg_; }
    ContractPage list_contracts(std::string_view cursor) override;
    std::vector<NftEntry> list_nfts(std::string_view contract_address) override;

    const FixtureSet& fixture() const { return set_; }
    /// Rewrites relative media to base + "/" + media, e.g. a loopback server.
    void set_media_base(std::string base) { media_base_ = std::move(base); }

private:
    std::string media_url(const FixtureToken& t) const;

    ProviderConfig cfg_;
    FixtureSet set_;
    FixtureLatency latency_;
    std::optional<std::string> media_base_;
};

}  // namespace unvd::chain
