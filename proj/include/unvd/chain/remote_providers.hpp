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

#include <memory>

#include "unvd/chain/provider.hpp"

namespace unvd::chain {

/// EIP-721 subgraph over GraphQL-over-HTTP POST, paging with (first, skip).
/// Token media is resolved from each tokenURI's metadata "image" field, one
/// request per token.
class SubgraphProvider final : public ChainProvider {
public:
    explicit SubgraphProvider(ProviderConfig cfg, Sleeper sleep = real_sleeper());
    ~SubgraphProvider() override;

    const ProviderConfig& config() const override { return cfg_; }
    ContractPage list_contracts(std::string_view cursor) override;
    std::vector<NftEntry> list_nfts(std::string_view contract_address) override;

private:
    struct State;
    ProviderConfig cfg_;
    std::unique_ptr<State> state_;
};

/// Cached NFT API in the getNFTsForCollection style: one REST call returns a
/// page of tokens with media already resolved, paged by nextToken. Cannot
/// enumerate contracts; pair it with a SubgraphProvider via SplitProvider.
class NftApiProvider final : public ChainProvider {
public:
    explicit NftApiProvider(ProviderConfig cfg, Sleeper sleep = real_sleeper());
    ~NftApiProvider() override;

    const ProviderConfig& config() const override { return cfg_; }
    ContractPage list_contracts(std::string_view cursor) override;
    std::vector<NftEntry> list_nfts(std::string_view contract_address) override;

private:
    struct State;
    ProviderConfig cfg_;
    std::unique_ptr<State> state_;
};

std::shared_ptr<ChainProvider> make_provider(const ProviderConfig& cfg);

/// "0x1f" or "31" -> "31". Throws InvalidArgument on anything else.
std::string token_id_to_decimal(std::string_view id);

}  // namespace unvd::chain
