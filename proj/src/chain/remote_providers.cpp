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

#include "unvd/chain/remote_providers.hpp"

#include <algorithm>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "http_client.hpp"
#include "unvd/chain/fixture_provider.hpp"
#include "unvd/common/error.hpp"
#include "unvd/embedding/base64.hpp"

namespace unvd::chain {

namespace {

using nlohmann::json;

constexpr std::string_view kIpfsGateway = "https://ipfs.io/ipfs/";

std::string resolve_ipfs(std::string_view url) {
    if (url.substr(0, 7) == "ipfs://") {
        auto rest = url.substr(7);
        if (rest.substr(0, 5) == "ipfs/") {
            rest.remove_prefix(5);
        }
        return std::string(kIpfsGateway) + std::string(rest);
    }
    return std::string(url);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

json parse_body(const http::Reply& reply, std::string_view what) {
    auto j = json::parse(reply.body, nullptr, false);
    if (j.is_discarded()) {
        raise(ErrorCode::SchemaViolation, std::string(what) + " returned a non-JSON body");
    }
    return j;
}

}  // namespace

std::string token_id_to_decimal(std::string_view id) {
    const bool hex = id.substr(0, 2) == "0x" || id.substr(0, 2) == "0X";
    const auto digits = hex ? id.substr(2) : id;
    if (digits.empty()) {
        raise(ErrorCode::InvalidArgument, "empty token id");
    }
    if (!hex) {
        std::string s(digits);
        s.erase(0, std::min(s.find_first_not_of('0'), s.size() - 1));
        if (!meta::is_valid_token_id(s)) {
            raise(ErrorCode::InvalidArgument, "bad token id " + std::string(id));
        }
        return s;
    }
    // Little-endian base-10^9 limbs.
    std::vector<std::uint64_t> limbs{0};
    for (char c : digits) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else raise(ErrorCode::InvalidArgument, "bad hex token id " + std::string(id));
        std::uint64_t carry = static_cast<std::uint64_t>(v);
        for (auto& limb : limbs) {
            const auto x = limb * 16 + carry;
            limb = x % 1'000'000'000;
            carry = x / 1'000'000'000;
        }
        if (carry != 0) {
            limbs.push_back(carry);
        }
    }
    std::string out = std::to_string(limbs.back());
    for (auto it = limbs.rbegin() + 1; it != limbs.rend(); ++it) {
        auto part = std::to_string(*it);
        out += std::string(9 - part.size(), '0') + part;
    }
    if (!meta::is_valid_token_id(out)) {
        raise(ErrorCode::InvalidArgument, "token id " + std::string(id) + " exceeds 256 bits");
    }
    return out;
}

// --- subgraph ---------------------------------------------------------------

struct SubgraphProvider::State {
    State(Sleeper s, double rps) : sleep(std::move(s)), limiter(rps) {}

    Sleeper sleep;
    RateLimiter limiter;

    http::Reply call(const ProviderConfig& cfg, http::Request req) {
        req.timeout = cfg.timeout;
        if (!cfg.api_key.empty()) {
            req.headers["Authorization"] = "Bearer " + cfg.api_key;
        }
        return with_retry<http::Reply>(cfg.retry, sleep, [&] {
            limiter.acquire();
            auto reply = http::send(req);
            http::expect_ok(reply, req.url);
            return reply;
        });
    }

    json query(const ProviderConfig& cfg, std::string_view text, json variables) {
        http::Request req;
        req.method = "POST";
        req.url = cfg.endpoint;
        req.body = json{{"query", text}, {"variables", std::move(variables)}}.dump();
        auto body = parse_body(call(cfg, std::move(req)), "subgraph");
        if (body.contains("errors") && !body.at("errors").empty()) {
            raise(ErrorCode::SchemaViolation, "subgraph error: " + body.at("errors").dump());
        }
        if (!body.contains("data") || !body.at("data").is_object()) {
            raise(ErrorCode::SchemaViolation, "subgraph reply has no data object");
        }
        return body.at("data");
    }

    std::optional<std::string> resolve_media(const ProviderConfig& cfg, const std::string& token_uri) {
        std::string metadata;
        constexpr std::string_view inline_json = "data:application/json;base64,";
        if (token_uri.rfind(inline_json, 0) == 0) {
            metadata = embedding::base64_decode(std::string_view(token_uri).substr(inline_json.size()));
        } else {
            http::Request req;
            req.url = resolve_ipfs(token_uri);
            req.max_body = 1 << 20;
            metadata = call(cfg, std::move(req)).body;
        }
        const auto j = json::parse(metadata, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            return std::nullopt;
        }
        for (const char* key : {"image", "image_url", "animation_url"}) {
            if (j.contains(key) && j.at(key).is_string() && !j.at(key).get<std::string>().empty()) {
                return resolve_ipfs(j.at(key).get<std::string>());
            }
        }
        return std::nullopt;
    }
};

SubgraphProvider::SubgraphProvider(ProviderConfig cfg, Sleeper sleep)
    : cfg_(std::move(cfg)), state_(std::make_unique<State>(std::move(sleep), cfg_.requests_per_second)) {
    cfg_.validate();
}

SubgraphProvider::~SubgraphProvider() = default;

ContractPage SubgraphProvider::list_contracts(std::string_view cursor) {
    const auto skip = parse_offset_cursor(cursor);
    const auto data = state_->query(
        cfg_,
        "query Contracts($first: Int!, $skip: Int!) { tokenContracts(first: $first, skip: $skip, "
        "orderBy: id, orderDirection: asc) { id name } }",
        json{{"first", cfg_.page_size}, {"skip", skip}});
    ContractPage page;
    for (const auto& c : data.at("tokenContracts")) {
        meta::ContractRecord rec;
        rec.chain = cfg_.chain;
        rec.address = lower(c.at("id").get<std::string>());
        if (c.contains("name") && c.at("name").is_string()) {
            rec.name = c.at("name").get<std::string>();
        }
        if (!meta::is_valid_address(rec.address)) {
            spdlog::warn("subgraph returned malformed contract id {}", rec.address);
            continue;
        }
        page.contracts.push_back(std::move(rec));
    }
    if (data.at("tokenContracts").size() == cfg_.page_size) {
        page.next_cursor = make_offset_cursor(skip + cfg_.page_size);
    }
    return page;
}

std::vector<NftEntry> SubgraphProvider::list_nfts(std::string_view contract_address) {
    std::vector<NftEntry> out;
    for (std::size_t skip = 0;; skip += cfg_.page_size) {
        const auto data = state_->query(
            cfg_,
            "query Tokens($contract: String!, $first: Int!, $skip: Int!) { tokenContract(id: $contract) "
            "{ id } tokens(first: $first, skip: $skip, where: {contract: $contract}, orderBy: tokenID, "
            "orderDirection: asc) { tokenID tokenURI } }",
            json{{"contract", contract_address}, {"first", cfg_.page_size}, {"skip", skip}});
        if (skip == 0 && (!data.contains("tokenContract") || data.at("tokenContract").is_null())) {
            raise(ErrorCode::UnknownContract, "subgraph has no contract " + std::string(contract_address));
        }
        const auto& tokens = data.at("tokens");
        for (const auto& t : tokens) {
            NftEntry e;
            e.contract_address = std::string(contract_address);
            e.token_id = token_id_to_decimal(t.at("tokenID").get<std::string>());
            if (t.contains("tokenURI") && t.at("tokenURI").is_string()) {
                e.metadata_url = t.at("tokenURI").get<std::string>();
            }
            std::optional<std::string> media;
            if (e.metadata_url) {
                try {
                    media = state_->resolve_media(cfg_, *e.metadata_url);
                } catch (const Error& err) {
                    spdlog::warn("token {}:{} metadata unresolved: {}", contract_address, e.token_id, err.what());
                }
            }
            if (!media) {
                continue;
            }
            e.media_url = *media;
            out.push_back(std::move(e));
        }
        if (tokens.size() < cfg_.page_size) {
            break;
        }
    }
    return out;
}

// --- cached NFT API ---------------------------------------------------------

struct NftApiProvider::State {
    State(Sleeper s, double rps) : sleep(std::move(s)), limiter(rps) {}

    Sleeper sleep;
    RateLimiter limiter;
};

NftApiProvider::NftApiProvider(ProviderConfig cfg, Sleeper sleep)
    : cfg_(std::move(cfg)), state_(std::make_unique<State>(std::move(sleep), cfg_.requests_per_second)) {
    cfg_.validate();
}

NftApiProvider::~NftApiProvider() = default;

ContractPage NftApiProvider::list_contracts(std::string_view) {
    raise(ErrorCode::InvalidConfig,
          "the nft_api provider cannot enumerate contracts; use a subgraph provider for discovery");
}

std::vector<NftEntry> NftApiProvider::list_nfts(std::string_view contract_address) {
    std::vector<NftEntry> out;
    std::string start;
    for (;;) {
        http::Request req;
        req.url = cfg_.endpoint + "/getNFTsForCollection?contractAddress=" + std::string(contract_address) +
                  "&withMetadata=true&limit=" + std::to_string(cfg_.page_size);
        if (!start.empty()) {
            req.url += "&startToken=" + start;
        }
        req.timeout = cfg_.timeout;
        if (!cfg_.api_key.empty()) {
            req.headers["X-API-Key"] = cfg_.api_key;
        }
        http::Reply reply;
        try {
            reply = with_retry<http::Reply>(cfg_.retry, state_->sleep, [&] {
                state_->limiter.acquire();
                auto r = http::send(req);
                http::expect_ok(r, "getNFTsForCollection");
                return r;
            });
        } catch (const Error& e) {
            if (e.code() == ErrorCode::HttpError && (e.detail() == 400 || e.detail() == 404)) {
                raise(ErrorCode::UnknownContract, "NFT API has no contract " + std::string(contract_address));
            }
            throw;
        }
        const auto body = parse_body(reply, "getNFTsForCollection");
        if (!body.contains("nfts") || !body.at("nfts").is_array()) {
            raise(ErrorCode::SchemaViolation, "getNFTsForCollection reply has no nfts array");
        }
        for (const auto& n : body.at("nfts")) {
            const auto& id = n.at("id");
            const auto type = id.contains("tokenMetadata") ? id.at("tokenMetadata").value("tokenType", "ERC721")
                                                           : std::string("ERC721");
            if (type != "ERC721") {
                continue;
            }
            NftEntry e;
            e.contract_address = std::string(contract_address);
            e.token_id = token_id_to_decimal(id.at("tokenId").get<std::string>());
            if (n.contains("tokenUri") && n.at("tokenUri").is_object()) {
                const auto uri = n.at("tokenUri").value("gateway", std::string());
                if (!uri.empty()) {
                    e.metadata_url = uri;
                }
            }
            if (n.contains("media") && n.at("media").is_array()) {
                for (const auto& m : n.at("media")) {
                    auto url = m.value("gateway", std::string());
                    if (url.empty()) {
                        url = m.value("raw", std::string());
                    }
                    if (!url.empty()) {
                        e.media_url = resolve_ipfs(url);
                        break;
                    }
                }
            }
            if (e.media_url.empty()) {
                continue;
            }
            out.push_back(std::move(e));
        }
        if (!body.contains("nextToken") || !body.at("nextToken").is_string() ||
            body.at("nextToken").get<std::string>().empty()) {
            break;
        }
        start = body.at("nextToken").get<std::string>();
    }
    return out;
}

std::shared_ptr<ChainProvider> make_provider(const ProviderConfig& cfg) {
    switch (cfg.kind) {
    case ProviderKind::fixture: return std::make_shared<FixtureProvider>(cfg);
    case ProviderKind::subgraph: return std::make_shared<SubgraphProvider>(cfg);
    case ProviderKind::nft_api: return std::make_shared<NftApiProvider>(cfg);
    }
    raise(ErrorCode::InvalidConfig, "unknown provider kind");
}

}  // namespace unvd::chain
