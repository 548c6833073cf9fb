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
#include <string>
#include <string_view>

#include "unvd/chain/fixture_set.hpp"

namespace unvd::chain {

/// Serves a fixture over loopback HTTP for integration tests.
///
///   GET  /media/<file>                      media bytes
///   GET  /metadata/<contract>/<token>       {"name", "image"}
///   POST /subgraph                          tokenContracts / tokens queries
///   GET  /nft-api/getNFTsForCollection      cached-API style token pages
///   GET  /status/<code>                     empty reply with that status
///   GET  /bytes/<n>, /chunked/<n>           n filler bytes, with and without
///                                           Content-Length
///   GET  /slow/<ms>                         replies after a delay
class FixtureServer {
public:
    explicit FixtureServer(FixtureSet set);
    ~FixtureServer();
    FixtureServer(const FixtureServer&) = delete;
    FixtureServer& operator=(const FixtureServer&) = delete;

    std::string base_url() const;
    std::string subgraph_url() const { return base_url() + "/subgraph"; }
    std::string nft_api_url() const { return base_url() + "/nft-api"; }
    std::string media_url(const FixtureToken& token) const;

    /// The next `n` requests to the subgraph, NFT API or metadata routes
    /// answer with `status`.
    void fail_next(std::size_t n, int status = 503);
    /// Requests served on the subgraph, NFT API and metadata routes.
    std::size_t provider_requests() const;

    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace unvd::chain
