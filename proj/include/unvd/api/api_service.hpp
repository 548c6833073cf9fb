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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "unvd/api/auth_token.hpp"
#include "unvd/embedding/embedder.hpp"
#include "unvd/meta/metadata_store.hpp"
#include "unvd/tasks/pipeline.hpp"
#include "unvd/tasks/worker_pool.hpp"
#include "unvd/vectors/vector_store.hpp"

namespace unvd::api {

struct ApiConfig {
    std::string secret;
    std::string admin_user;
    std::string admin_password;
    std::chrono::seconds token_lifetime{3600};
    std::string cors_origin = "*";
    std::size_t max_visualize_points = 2000;
    std::size_t max_body_bytes = 32u << 20;
    embedding::DecodeLimits decode;

    /// UNVD_SECRET, UNVD_ADMIN_USER, UNVD_ADMIN_PASS. A missing secret is
    /// replaced by a random one, so tokens do not survive a restart.
    static ApiConfig from_env();
};

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    /// Header names in lower case.
    std::map<std::string, std::string> headers;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::map<std::string, std::string> headers;
};

struct ApiDeps {
    meta::MetadataStore& meta;
    vectors::VectorStore& vectors;
    std::shared_ptr<const embedding::Embedder> embedder;
    /// Needed by /admin/enqueue and retry; those answer 503 without it.
    tasks::Pipeline* pipeline = nullptr;
    /// Stats of workers running in this process, if any.
    std::function<std::optional<tasks::WorkerStats>()> worker_stats;
};

/// JSON-over-HTTP front end.
///
/// Public:  GET /health, POST /search, POST /visualize, POST /auth/login
/// Admin:   POST /admin/enqueue, GET /admin/tasks, POST /admin/tasks/{id}/retry,
///          GET /admin/analytics  (Authorization: Bearer <token>)
///
/// Errors are {"error": {"code": <ErrorCode name>, "message": ...}} with 400
/// for unreadable input, 401 for auth, 404 for unknown names, 409 for state
/// conflicts, 413 for oversize bodies or media and 422 for values out of range.
class ApiService {
public:
    ApiService(ApiConfig config, ApiDeps deps, std::shared_ptr<Clock> clock = system_clock());
    ~ApiService();

    ApiService(const ApiService&) = delete;
    ApiService& operator=(const ApiService&) = delete;

    /// Transport-independent dispatch; the HTTP server calls this too.
    ApiResponse handle(const ApiRequest& request) const;

    /// Binds and serves on a background thread. Port 0 picks a free port;
    /// returns the bound port. Throws IoError if binding fails.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Blocks until stop() is called from elsewhere.
    void wait();
    void stop();
    std::string base_url() const;

    const TokenSigner& signer() const;
    /// Admin POSTs that returned 2xx.
    std::uint64_t admin_mutations() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace unvd::api
