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

#include "unvd/chain/fixture_server.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/chain/provider.hpp"
#include "unvd/meta/records.hpp"

namespace unvd::chain {

namespace {

using nlohmann::json;

std::string decimal_to_hex(std::string dec) {
    std::string hex;
    while (!(dec.size() == 1 && dec[0] == '0')) {
        std::string quotient;
        int rem = 0;
        for (char c : dec) {
            const int cur = rem * 10 + (c - '0');
            if (!quotient.empty() || cur / 16 != 0) {
                quotient.push_back(static_cast<char>('0' + cur / 16));
            }
            rem = cur % 16;
        }
        hex.push_back("0123456789abcdef"[rem]);
        dec = quotient.empty() ? "0" : quotient;
    }
    if (hex.empty()) {
        hex = "0";
    }
    std::reverse(hex.begin(), hex.end());
    return "0x" + std::string(64 - std::min<std::size_t>(64, hex.size()), '0') + hex;
}

std::size_t to_size(const std::string& s) {
    std::size_t v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

}  // namespace

struct FixtureServer::Impl {
    FixtureSet set;
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<std::size_t> failures{0};
    std::atomic<int> failure_status{503};
    std::atomic<std::size_t> provider_requests{0};

    std::string base() const { return "http://127.0.0.1:" + std::to_string(port); }

    std::string metadata_url(const FixtureToken& t) const {
        return base() + "/metadata/" + t.contract + "/" + t.token_id;
    }

    std::string media(const FixtureToken& t) const {
        if (t.media.find("://") != std::string::npos) {
            return t.media;
        }
        return base() + "/" + t.media;
    }

    const std::vector<FixtureToken>* tokens_of(const std::string& contract) const {
        auto it = set.tokens.find(contract);
        if (it != set.tokens.end()) {
            return &it->second;
        }
        static const std::vector<FixtureToken> empty;
        for (const auto& c : set.contracts) {
            if (c.address == contract) {
                return &empty;
            }
        }
        return nullptr;
    }

    /// Counts the request and applies pending injected failures.
    bool intercept(httplib::Response& res) {
        ++provider_requests;
        auto pending = failures.load();
        while (pending > 0) {
            if (failures.compare_exchange_weak(pending, pending - 1)) {
                res.status = failure_status.load();
                res.set_content("{\"error\":\"injected\"}", "application/json");
                return true;
            }
        }
        return false;
    }

    void subgraph(const httplib::Request& req, httplib::Response& res) {
        if (intercept(res)) {
            return;
        }
        const auto body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("query")) {
            res.status = 400;
            res.set_content(R"({"errors":[{"message":"bad request"}]})", "application/json");
            return;
        }
        const auto query = body.at("query").get<std::string>();
        const auto vars = body.value("variables", json::object());
        const auto first = vars.value("first", 100u);
        const auto skip = vars.value("skip", 0u);
        json data = json::object();
        if (query.find("tokenContracts") != std::string::npos) {
            auto list = json::array();
            for (std::size_t i = skip; i < set.contracts.size() && i < skip + first; ++i) {
                list.push_back({{"id", set.contracts[i].address}, {"name", set.contracts[i].name}});
            }
            data["tokenContracts"] = list;
        } else if (query.find("tokens(") != std::string::npos) {
            const auto contract = vars.value("contract", std::string());
            const auto* tokens = tokens_of(contract);
            data["tokenContract"] = tokens ? json{{"id", contract}} : json();
            auto list = json::array();
            if (tokens) {
                for (std::size_t i = skip; i < tokens->size() && i < skip + first; ++i) {
                    list.push_back({{"tokenID", (*tokens)[i].token_id}, {"tokenURI", metadata_url((*tokens)[i])}});
                }
            }
            data["tokens"] = list;
        } else {
            res.set_content(R"({"errors":[{"message":"unsupported query"}]})", "application/json");
            return;
        }
        res.set_content(json{{"data", data}}.dump(), "application/json");
    }

    void nft_api(const httplib::Request& req, httplib::Response& res) {
        if (intercept(res)) {
            return;
        }
        const auto contract = req.get_param_value("contractAddress");
        const auto* tokens = tokens_of(contract);
        if (tokens == nullptr) {
            res.status = 400;
            res.set_content(R"({"error":"contract not found"})", "application/json");
            return;
        }
        const auto limit = std::max<std::size_t>(1, to_size(req.get_param_value("limit")));
        std::size_t start = 0;
        if (req.has_param("startToken")) {
            const auto want = req.get_param_value("startToken");
            while (start < tokens->size() && decimal_to_hex((*tokens)[start].token_id) != want) {
                ++start;
            }
        }
        auto nfts = json::array();
        const auto end = std::min(tokens->size(), start + limit);
        for (auto i = start; i < end; ++i) {
            const auto& t = (*tokens)[i];
            nfts.push_back({{"contract", {{"address", contract}}},
                            {"id", {{"tokenId", decimal_to_hex(t.token_id)}, {"tokenMetadata", {{"tokenType", "ERC721"}}}}},
                            {"tokenUri", {{"gateway", metadata_url(t)}}},
                            {"media", json::array({{{"gateway", media(t)}}})}});
        }
        json body{{"nfts", nfts}};
        if (end < tokens->size()) {
            body["nextToken"] = decimal_to_hex((*tokens)[end].token_id);
        }
        res.set_content(body.dump(), "application/json");
    }

    void metadata(const httplib::Request& req, httplib::Response& res) {
        if (intercept(res)) {
            return;
        }
        const auto* tokens = tokens_of(req.matches[1]);
        if (tokens != nullptr) {
            for (const auto& t : *tokens) {
                if (t.token_id == req.matches[2]) {
                    res.set_content(json{{"name", "#" + t.token_id}, {"image", media(t)}}.dump(), "application/json");
                    return;
                }
            }
        }
        res.status = 404;
    }
};

FixtureServer::FixtureServer(FixtureSet set) : impl_(std::make_unique<Impl>()) {
    auto& impl = *impl_;
    impl.set = std::move(set);
    auto& svr = impl.server;

    svr.Get(R"(/media/([A-Za-z0-9._-]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto path = impl_->set.root / "media" / std::string(req.matches[1]);
        if (!std::filesystem::exists(path)) {
            res.status = 404;
            return;
        }
        res.set_content(read_file(path), "image/png");
    });
    svr.Get(R"(/metadata/(0x[0-9a-f]{40})/(\d+))",
            [this](const httplib::Request& req, httplib::Response& res) { impl_->metadata(req, res); });
    svr.Post("/subgraph", [this](const httplib::Request& req, httplib::Response& res) { impl_->subgraph(req, res); });
    svr.Get("/nft-api/getNFTsForCollection",
            [this](const httplib::Request& req, httplib::Response& res) { impl_->nft_api(req, res); });
    svr.Get(R"(/status/(\d{3}))", [](const httplib::Request& req, httplib::Response& res) {
        res.status = std::stoi(req.matches[1]);
        res.set_content("status " + std::string(req.matches[1]), "text/plain");
    });
    svr.Get(R"(/bytes/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
        const auto total = to_size(req.matches[1]);
        res.set_content_provider(total, "application/octet-stream",
                                 [](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                                     const std::string chunk(std::min<std::size_t>(length, 1 << 16), 'x');
                                     (void)offset;
                                     return sink.write(chunk.data(), chunk.size());
                                 });
    });
    svr.Get(R"(/chunked/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
        const auto total = to_size(req.matches[1]);
        res.set_chunked_content_provider("application/octet-stream",
                                         [total](std::size_t offset, httplib::DataSink& sink) {
                                             if (offset >= total) {
                                                 sink.done();
                                                 return true;
                                             }
                                             const std::string chunk(std::min<std::size_t>(total - offset, 1 << 16), 'x');
                                             return sink.write(chunk.data(), chunk.size());
                                         });
    });
    svr.Get(R"(/slow/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
        std::this_thread::sleep_for(Millis(to_size(req.matches[1])));
        res.set_content("late", "text/plain");
    });

    impl.port = svr.bind_to_any_port("127.0.0.1");
    if (impl.port <= 0) {
        raise(ErrorCode::IoError, "fixture server could not bind a loopback port");
    }
    impl.thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl.server.wait_until_ready();
}

FixtureServer::~FixtureServer() { stop(); }

void FixtureServer::stop() {
    if (impl_ && impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

std::string FixtureServer::base_url() const { return impl_->base(); }

std::string FixtureServer::media_url(const FixtureToken& token) const { return impl_->media(token); }

void FixtureServer::fail_next(std::size_t n, int status) {
    impl_->failure_status = status;
    impl_->failures = n;
}

std::size_t FixtureServer::provider_requests() const { return impl_->provider_requests.load(); }

}  // namespace unvd::chain
