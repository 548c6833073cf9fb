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

#include "unvd/api/api_service.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "unvd/analytics/experiment.hpp"
#include "unvd/analytics/tsne.hpp"
#include "unvd/common/clock.hpp"
#include "unvd/common/error.hpp"
#include "unvd/common/ids.hpp"
#include "unvd/meta/records.hpp"

namespace unvd::api {

using nlohmann::json;

namespace {

// Raised inside handlers to answer with a specific status.
struct HttpFailure {
    int status;
    std::string code;
    std::string message;
};

[[noreturn]] void fail(int status, std::string_view code, std::string message) {
    throw HttpFailure{status, std::string(code), std::move(message)};
}

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::Base64Error:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::DecodeError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::BadCursor:
    case ErrorCode::InvalidId:
        return 400;
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::UnknownNamespace:
    case ErrorCode::UnknownTask:
    case ErrorCode::UnknownContract:
        return 404;
    case ErrorCode::DuplicatePending:
    case ErrorCode::IllegalTransition:
        return 409;
    case ErrorCode::TooLarge: return 413;
    case ErrorCode::SchemaViolation:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ZeroNorm:
    case ErrorCode::PerplexityOutOfRange:
    case ErrorCode::RankDeficient:
    case ErrorCode::DegenerateInput:
        return 422;
    case ErrorCode::ProviderUnavailable: return 503;
    default: return 500;
    }
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

ApiResponse json_response(int status, const json& body) {
    ApiResponse r;
    r.status = status;
    r.body = dump(body);
    r.headers["Content-Type"] = "application/json";
    return r;
}

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
    return json_response(status, json{{"error", {{"code", code}, {"message", message}}}});
}

json parse_object(const std::string& body) {
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        fail(400, "InvalidArgument", "request body must be a JSON object");
    }
    return j;
}

const json* field(const json& obj, const char* name) {
    const auto it = obj.find(name);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string required_string(const json& obj, const char* name) {
    const auto* v = field(obj, name);
    if (v == nullptr || !v->is_string()) {
        fail(400, "InvalidArgument", std::string("field '") + name + "' must be a string");
    }
    return v->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* name) {
    const auto* v = field(obj, name);
    if (v == nullptr) {
        return std::nullopt;
    }
    if (!v->is_string()) {
        fail(400, "InvalidArgument", std::string("field '") + name + "' must be a string");
    }
    return v->get<std::string>();
}

/// Integer field checked against [lo, hi]; wrong type is 400, out of range 422.
std::optional<std::int64_t> optional_int(const json& obj, const char* name, std::int64_t lo, std::int64_t hi) {
    const auto* v = field(obj, name);
    if (v == nullptr) {
        return std::nullopt;
    }
    if (!v->is_number_integer()) {
        fail(400, "InvalidArgument", std::string("field '") + name + "' must be an integer");
    }
    bool in_range;
    std::int64_t value = 0;
    if (v->is_number_unsigned()) {
        const auto u = v->get<std::uint64_t>();
        in_range = u <= static_cast<std::uint64_t>(hi);
        value = in_range ? static_cast<std::int64_t>(u) : hi;
        in_range = in_range && value >= lo;
    } else {
        value = v->get<std::int64_t>();
        in_range = value >= lo && value <= hi;
    }
    if (!in_range) {
        fail(422, "InvalidArgument", std::string("field '") + name + "' must be in [" + std::to_string(lo) +
                                         ", " + std::to_string(hi) + "]");
    }
    return value;
}

std::optional<std::int64_t> query_int(const ApiRequest& req, const char* name, std::int64_t lo, std::int64_t hi) {
    const auto it = req.query.find(name);
    if (it == req.query.end() || it->second.empty()) {
        return std::nullopt;
    }
    std::int64_t v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < lo || v > hi) {
        fail(422, "InvalidArgument", std::string("query parameter '") + name + "' must be an integer in [" +
                                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
}

std::string lower_hex_address(std::string address) {
    static const std::regex mixed("^0[xX][0-9a-fA-F]{40}$");
    if (std::regex_match(address, mixed)) {
        std::transform(address.begin(), address.end(), address.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    return address;
}

json metadata_json(const vectors::Metadata& m) {
    json j = json::object();
    for (const auto& [k, v] : m) {
        j[k] = v;
    }
    return j;
}

json worker_json(const tasks::WorkerStats& s) {
    return {{"processed", s.processed},
            {"succeeded", s.succeeded},
            {"failed", s.failed},
            {"retried", s.retried},
            {"skipped", s.skipped},
            {"deferred", s.deferred},
            {"abandoned", s.abandoned},
            {"elapsed_seconds", s.elapsed_seconds},
            {"throughput", {{"contract", s.contract_per_second}, {"nft", s.nft_per_second}}}};
}

}  // namespace

ApiConfig ApiConfig::from_env() {
    ApiConfig c;
    auto env = [](const char* name) -> std::string {
        const char* v = std::getenv(name);
        return v == nullptr ? "" : v;
    };
    c.secret = env("UNVD_SECRET");
    c.admin_user = env("UNVD_ADMIN_USER");
    c.admin_password = env("UNVD_ADMIN_PASS");
    if (c.secret.empty()) {
        spdlog::warn("UNVD_SECRET is not set; using a random secret, tokens will not survive a restart");
        c.secret = random_hex_id(32);
    }
    return c;
}

struct ApiService::Impl {
    Impl(ApiConfig cfg, ApiDeps d, std::shared_ptr<Clock> clk)
        : config(std::move(cfg)), deps(std::move(d)), clock(std::move(clk)), signer(config.secret, clock) {}

    ApiConfig config;
    ApiDeps deps;
    std::shared_ptr<Clock> clock;
    TokenSigner signer;
    mutable std::atomic<std::uint64_t> mutations{0};
    httplib::Server server;
    std::thread thread;
    std::string host;
    int port = 0;

    void require_admin(const ApiRequest& req) const {
        const auto it = req.headers.find("authorization");
        if (it == req.headers.end()) {
            fail(401, "Unauthorized", "missing bearer token");
        }
        constexpr std::string_view prefix = "Bearer ";
        std::string_view value = it->second;
        if (value.substr(0, prefix.size()) != prefix) {
            fail(401, "Unauthorized", "authorization must be a bearer token");
        }
        signer.verify(value.substr(prefix.size()));
    }

    ApiResponse search(const ApiRequest& req) const {
        const auto body = parse_object(req.body);
        const auto image = required_string(body, "image_base64");
        const auto top_k = optional_int(body, "top_k", 1, 100).value_or(10);
        const auto ns = optional_string(body, "namespace").value_or("main");
        if (!deps.vectors.has_namespace(ns)) {
            fail(404, "UnknownNamespace", "no namespace '" + ns + "'");
        }
        const auto probe = embedding::embed_base64(*deps.embedder, image, config.decode);
        const auto hits = deps.vectors.query(ns, probe, static_cast<std::size_t>(top_k));
        json results = json::array();
        for (const auto& h : hits) {
            results.push_back({{"id", h.id}, {"distance", h.distance}, {"metadata", metadata_json(h.metadata)}});
        }
        const auto& d = deps.embedder->descriptor();
        return json_response(200, {{"results", results},
                                   {"embedder", {{"name", d.name}, {"dimension", d.dimension}, {"version", d.version}}}});
    }

    ApiResponse visualize(const ApiRequest& req) const {
        const auto body = parse_object(req.body);
        const auto* ids = field(body, "vector_ids");
        const auto* raw = field(body, "vectors");
        if ((ids == nullptr) == (raw == nullptr)) {
            fail(400, "InvalidArgument", "give exactly one of 'vector_ids' or 'vectors'");
        }
        const auto& list = ids != nullptr ? *ids : *raw;
        if (!list.is_array()) {
            fail(400, "InvalidArgument", "'vector_ids' / 'vectors' must be an array");
        }
        const auto n = list.size();
        if (n < 4) {
            fail(422, "InvalidArgument", "visualization needs at least 4 points, got " + std::to_string(n));
        }
        if (n > config.max_visualize_points) {
            fail(422, "InvalidArgument",
                 "visualization is limited to " + std::to_string(config.max_visualize_points) + " points");
        }
        std::optional<double> perplexity;
        if (const auto* p = field(body, "perplexity")) {
            if (!p->is_number()) {
                fail(400, "InvalidArgument", "'perplexity' must be a number");
            }
            perplexity = p->get<double>();
        }
        const auto seed = optional_int(body, "seed", 0, INT64_MAX).value_or(0);
        const auto ns = optional_string(body, "namespace").value_or("main");

        analytics::Matrix x;
        json labels = json::array();
        if (ids != nullptr) {
            if (!deps.vectors.has_namespace(ns)) {
                fail(404, "UnknownNamespace", "no namespace '" + ns + "'");
            }
            std::vector<std::vector<float>> rows;
            rows.reserve(n);
            for (const auto& id : list) {
                if (!id.is_string()) {
                    fail(400, "InvalidArgument", "'vector_ids' must hold strings");
                }
                auto rec = deps.vectors.fetch(ns, id.get<std::string>());
                if (!rec) {
                    fail(404, "UnknownId", "no vector '" + id.get<std::string>() + "' in '" + ns + "'");
                }
                rows.push_back(std::move(rec->vector));
                labels.push_back(id);
            }
            x = analytics::Matrix::from_rows(rows);
        } else {
            std::size_t dim = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& row = list[i];
                if (!row.is_array() || row.empty() || (i > 0 && row.size() != dim)) {
                    fail(422, "DimensionMismatch", "'vectors' must be non-empty arrays of one length");
                }
                if (i == 0) {
                    dim = row.size();
                    x = analytics::Matrix(n, dim);
                }
                for (std::size_t c = 0; c < dim; ++c) {
                    if (!row[c].is_number()) {
                        fail(400, "InvalidArgument", "'vectors' entries must be numbers");
                    }
                    x(i, c) = row[c].get<double>();
                    if (!std::isfinite(x(i, c))) {
                        fail(422, "InvalidArgument", "'vectors' entries must be finite");
                    }
                }
                labels.push_back(i);
            }
        }
        analytics::TsneOptions opts;
        opts.seed = static_cast<std::uint64_t>(seed);
        opts.perplexity = perplexity.value_or(analytics::default_perplexity(n));
        const auto result = analytics::tsne(x, opts);
        json points = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            points.push_back({result.projection.points(i, 0), result.projection.points(i, 1)});
        }
        json out{{"points", points}, {"seed", seed}, {"perplexity", opts.perplexity}};
        out[ids != nullptr ? "ids" : "indices"] = labels;
        return json_response(200, out);
    }

    ApiResponse login(const ApiRequest& req) const {
        const auto body = parse_object(req.body);
        const auto user = required_string(body, "username");
        const auto pass = required_string(body, "password");
        const bool configured = !config.admin_user.empty() && !config.admin_password.empty();
        const bool user_ok = constant_time_equal(user, config.admin_user);
        const bool pass_ok = constant_time_equal(pass, config.admin_password);
        if (!configured || !user_ok || !pass_ok) {
            fail(401, "Unauthorized", "bad credentials");
        }
        const auto token = signer.issue(user, config.token_lifetime);
        const auto expires = clock->now_ms() + config.token_lifetime.count() * 1000;
        return json_response(200, {{"token", token}, {"expires_at", format_utc(expires)}});
    }

    tasks::Pipeline& pipeline() const {
        if (deps.pipeline == nullptr) {
            fail(503, "ProviderUnavailable", "this server has no task pipeline configured");
        }
        return *deps.pipeline;
    }

    ApiResponse enqueue(const ApiRequest& req) const {
        const auto body = parse_object(req.body);
        const auto address = lower_hex_address(required_string(body, "address"));
        const auto chain = optional_string(body, "chain").value_or(std::string(meta::kDefaultChain));
        const auto id = pipeline().enqueue_contract(chain, address);
        ++mutations;
        return json_response(202, {{"task_id", id}, {"status", "pending"}});
    }

    ApiResponse list_tasks(const ApiRequest& req) const {
        std::optional<meta::TaskStatus> status;
        if (const auto it = req.query.find("status"); it != req.query.end() && !it->second.empty()) {
            status = meta::parse_task_status(it->second);
            if (!status) {
                fail(422, "InvalidArgument", "unknown task status '" + it->second + "'");
            }
        }
        const auto cursor_it = req.query.find("cursor");
        const std::string cursor = cursor_it == req.query.end() ? "" : cursor_it->second;
        const auto limit = query_int(req, "limit", 1, 1000).value_or(50);
        const auto page = deps.meta.list_tasks(status, cursor, static_cast<std::size_t>(limit));
        json items = json::array();
        for (const auto& t : page.items) {
            items.push_back(t);
        }
        return json_response(200, {{"items", items},
                                   {"next_cursor", page.next_cursor ? json(*page.next_cursor) : json(nullptr)}});
    }

    ApiResponse retry(std::string_view task_id) const {
        auto& p = pipeline();
        const auto task = deps.meta.get_task(task_id);
        if (!task) {
            fail(404, "UnknownTask", "no task '" + std::string(task_id) + "'");
        }
        if (task->status != meta::TaskStatus::failed) {
            fail(409, "IllegalTransition", "only failed tasks can be retried; task is " +
                                               std::string(meta::to_string(task->status)));
        }
        const auto updated = p.retry_task(task_id);
        ++mutations;
        return json_response(200, json(updated));
    }

    ApiResponse analytics_view() const {
        const auto s = deps.meta.analytics_summary(&deps.vectors);
        json out{{"contracts", s.contracts}, {"nfts", s.nfts}, {"tasks", s.tasks}, {"vectors", s.vectors}};
        std::optional<tasks::WorkerStats> w;
        if (deps.worker_stats) {
            w = deps.worker_stats();
        }
        out["workers"] = w ? worker_json(*w) : json(nullptr);
        return json_response(200, out);
    }

    ApiResponse route(const ApiRequest& req) const {
        const auto& m = req.method;
        const auto& p = req.path;
        auto only = [&](std::string_view method) {
            if (m != method) {
                fail(405, "MethodNotAllowed", std::string(p) + " accepts " + std::string(method));
            }
        };
        if (p == "/health") {
            only("GET");
            return json_response(200, {{"status", "ok"}});
        }
        if (p == "/search") {
            only("POST");
            return search(req);
        }
        if (p == "/visualize") {
            only("POST");
            return visualize(req);
        }
        if (p == "/auth/login") {
            only("POST");
            return login(req);
        }
        if (p.rfind("/admin/", 0) == 0) {
            if (p == "/admin/enqueue") {
                only("POST");
                require_admin(req);
                return enqueue(req);
            }
            if (p == "/admin/tasks") {
                only("GET");
                require_admin(req);
                return list_tasks(req);
            }
            if (p == "/admin/analytics") {
                only("GET");
                require_admin(req);
                return analytics_view();
            }
            constexpr std::string_view tasks_prefix = "/admin/tasks/";
            constexpr std::string_view retry_suffix = "/retry";
            if (p.size() > tasks_prefix.size() + retry_suffix.size() && p.rfind(tasks_prefix, 0) == 0 &&
                p.compare(p.size() - retry_suffix.size(), retry_suffix.size(), retry_suffix) == 0) {
                only("POST");
                require_admin(req);
                const auto id = std::string_view(p).substr(
                    tasks_prefix.size(), p.size() - tasks_prefix.size() - retry_suffix.size());
                if (id.find('/') != std::string_view::npos) {
                    fail(404, "NotFound", "no route " + p);
                }
                return retry(id);
            }
        }
        fail(404, "NotFound", "no route " + p);
    }

    ApiResponse handle(const ApiRequest& req) const {
        ApiResponse res;
        if (req.method == "OPTIONS") {
            res.status = 204;
            res.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
            res.headers["Access-Control-Allow-Headers"] = "Authorization, Content-Type";
            res.headers["Access-Control-Max-Age"] = "600";
        } else {
            try {
                res = route(req);
            } catch (const HttpFailure& f) {
                res = error_response(f.status, f.code, f.message);
            } catch (const Error& e) {
                const int status = status_for(e.code());
                if (status >= 500) {
                    spdlog::error("{} {}: {}", req.method, req.path, e.what());
                }
                res = error_response(status, to_string(e.code()), e.what());
            } catch (const json::exception& e) {
                res = error_response(400, "InvalidArgument", e.what());
            } catch (const std::exception& e) {
                spdlog::error("{} {}: {}", req.method, req.path, e.what());
                res = error_response(500, "InternalError", "internal error");
            }
        }
        if (!config.cors_origin.empty()) {
            res.headers["Access-Control-Allow-Origin"] = config.cors_origin;
        }
        return res;
    }
};

ApiService::ApiService(ApiConfig config, ApiDeps deps, std::shared_ptr<Clock> clock)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(deps), std::move(clock))) {
    if (!impl_->deps.embedder) {
        raise(ErrorCode::InvalidConfig, "api service needs an embedder");
    }
}

ApiService::~ApiService() { stop(); }

ApiResponse ApiService::handle(const ApiRequest& request) const { return impl_->handle(request); }

const TokenSigner& ApiService::signer() const { return impl_->signer; }

std::uint64_t ApiService::admin_mutations() const { return impl_->mutations.load(); }

int ApiService::start(const std::string& host, int port) {
    auto& svr = impl_->server;
    svr.set_payload_max_length(impl_->config.max_body_bytes);
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        ApiRequest r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) {
            r.query.emplace(k, v);
        }
        for (const auto& [k, v] : req.headers) {
            std::string key = k;
            std::transform(key.begin(), key.end(), key.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            r.headers[key] = v;
        }
        r.body = req.body;
        const auto out = impl_->handle(r);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) {
            if (k != "Content-Type") {
                res.set_header(k, v);
            }
        }
        const auto ct = out.headers.find("Content-Type");
        res.set_content(out.body, ct == out.headers.end() ? "text/plain" : ct->second);
    };
    const std::string any = ".*";
    svr.Get(any, dispatch);
    svr.Post(any, dispatch);
    svr.Put(any, dispatch);
    svr.Delete(any, dispatch);
    svr.Patch(any, dispatch);
    svr.Options(any, dispatch);
    svr.set_error_handler([this](const httplib::Request&, httplib::Response& res) {
        // Reached for failures httplib produces itself, such as 413.
        if (res.body.empty()) {
            const auto out = error_response(res.status, res.status == 413 ? "TooLarge" : "HttpError",
                                            httplib::status_message(res.status));
            res.set_content(out.body, "application/json");
            if (!impl_->config.cors_origin.empty()) {
                res.set_header("Access-Control-Allow-Origin", impl_->config.cors_origin);
            }
        }
    });
    const int bound = port == 0 ? svr.bind_to_any_port(host) : (svr.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) {
        raise(ErrorCode::IoError, "could not bind " + host + ":" + std::to_string(port));
    }
    impl_->host = host;
    impl_->port = bound;
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void ApiService::wait() {
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

void ApiService::stop() {
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

std::string ApiService::base_url() const {
    return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

}  // namespace unvd::api
