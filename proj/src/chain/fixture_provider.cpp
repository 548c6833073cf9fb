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

#include "unvd/chain/fixture_provider.hpp"

#include <thread>

#include "unvd/common/error.hpp"

namespace unvd::chain {

FixtureProvider::FixtureProvider(ProviderConfig cfg, FixtureLatency latency)
    : FixtureProvider(cfg, FixtureSet::load(cfg.endpoint), latency) {}

FixtureProvider::FixtureProvider(ProviderConfig cfg, FixtureSet set, FixtureLatency latency)
    : cfg_(std::move(cfg)), set_(std::move(set)), latency_(latency) {
    cfg_.validate();
}

ContractPage FixtureProvider::list_contracts(std::string_view cursor) {
    const auto start = std::chrono::steady_clock::now();
    const auto offset = parse_offset_cursor(cursor);
    if (offset > set_.contracts.size()) {
        raise(ErrorCode::BadCursor, "cursor offset " + std::to_string(offset) + " is past the end");
    }
    ContractPage page;
    const auto end = std::min<std::size_t>(set_.contracts.size(), offset + cfg_.page_size);
    for (auto i = offset; i < end; ++i) {
        meta::ContractRecord rec;
        rec.chain = cfg_.chain;
        rec.address = set_.contracts[i].address;
        if (!set_.contracts[i].name.empty()) {
            rec.name = set_.contracts[i].name;
        }
        page.contracts.push_back(std::move(rec));
    }
    if (end < set_.contracts.size()) {
        page.next_cursor = make_offset_cursor(end);
    }
    std::this_thread::sleep_until(start + latency_.per_page);
    return page;
}

std::vector<NftEntry> FixtureProvider::list_nfts(std::string_view contract_address) {
    const auto start = std::chrono::steady_clock::now();
    const auto it = set_.tokens.find(std::string(contract_address));
    if (it == set_.tokens.end()) {
        const bool declared = std::any_of(set_.contracts.begin(), set_.contracts.end(),
                                          [&](const auto& c) { return c.address == contract_address; });
        if (!declared) {
            raise(ErrorCode::UnknownContract, "fixture has no contract " + std::string(contract_address));
        }
        std::this_thread::sleep_until(start + latency_.per_page);
        return {};
    }
    std::vector<NftEntry> out;
    out.reserve(it->second.size());
    for (const auto& t : it->second) {
        out.push_back({t.contract, t.token_id, media_url(t), t.metadata_url, std::string(meta::kErc721)});
    }
    const auto pages = std::max<std::size_t>(1, (out.size() + cfg_.page_size - 1) / cfg_.page_size);
    std::this_thread::sleep_until(start + latency_.per_page * static_cast<std::int64_t>(pages) +
                                  latency_.per_token * static_cast<std::int64_t>(out.size()));
    return out;
}

std::string FixtureProvider::media_url(const FixtureToken& t) const {
    if (media_base_ && t.media.find("://") == std::string::npos) {
        return *media_base_ + "/" + t.media;
    }
    return set_.media_url(t);
}

}  // namespace unvd::chain
