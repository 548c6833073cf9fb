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

#include "http_client.hpp"

#include <chrono>

#include <httplib.h>

#include "unvd/common/error.hpp"

namespace unvd::chain::http {

Url parse_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        raise(ErrorCode::InvalidArgument, "not an absolute URL: " + std::string(url));
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        raise(ErrorCode::InvalidArgument, "unsupported URL scheme: " + std::string(scheme));
    }
    const auto rest = url.substr(scheme_end + 3);
    const auto slash = rest.find('/');
    const auto host = rest.substr(0, slash);
    if (host.empty()) {
        raise(ErrorCode::InvalidArgument, "URL has no host: " + std::string(url));
    }
    Url out;
    out.origin = std::string(scheme) + "://" + std::string(host);
    out.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    return out;
}

Reply send(const Request& req) {
    const auto url = parse_url(req.url);
    httplib::Client client(url.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(req.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(req.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_follow_location(true);

    httplib::Headers headers;
    for (const auto& [k, v] : req.headers) {
        headers.emplace(k, v);
    }

    const auto start = std::chrono::steady_clock::now();
    const auto deadline = start + req.timeout;
    bool too_large = false;
    bool timed_out = false;
    Reply reply;

    httplib::Result result{nullptr, httplib::Error::Unknown};
    if (req.method == "GET") {
        result = client.Get(
            url.target, headers,
            [&](const httplib::Response& r) {
                reply.status = r.status;
                reply.content_type = r.get_header_value("Content-Type");
                if (req.max_body && r.has_header("Content-Length")) {
                    const auto len = std::stoull(r.get_header_value("Content-Length"));
                    if (len > *req.max_body) {
                        too_large = true;
                        return false;
                    }
                }
                return true;
            },
            [&](const char* data, std::size_t len) {
                reply.body.append(data, len);
                if (req.max_body && reply.body.size() > *req.max_body) {
                    too_large = true;
                    return false;
                }
                if (std::chrono::steady_clock::now() > deadline) {
                    timed_out = true;
                    return false;
                }
                return true;
            });
    } else if (req.method == "POST") {
        result = client.Post(url.target, headers, req.body, req.content_type);
        if (result) {
            reply.status = result->status;
            reply.body = result->body;
            reply.content_type = result->get_header_value("Content-Type");
        }
    } else {
        raise(ErrorCode::InvalidArgument, "unsupported HTTP method " + req.method);
    }

    if (too_large) {
        raise(ErrorCode::TooLarge, "response from " + req.url + " exceeds " +
                                       std::to_string(req.max_body.value_or(0)) + " bytes");
    }
    const bool late = std::chrono::steady_clock::now() >= deadline;
    if (timed_out || (!result && (result.error() == httplib::Error::ConnectionTimeout ||
                                  ((result.error() == httplib::Error::Read || result.error() == httplib::Error::Write) && late)))) {
        raise(ErrorCode::FetchTimeout, "request to " + req.url + " timed out after " +
                                           std::to_string(req.timeout.count()) + " ms");
    }
    if (!result) {
        raise(ErrorCode::ProviderUnavailable,
              "request to " + req.url + " failed: " + httplib::to_string(result.error()));
    }
    if (reply.status == 0) {
        reply.status = result->status;
    }
    return reply;
}

void expect_ok(const Reply& reply, std::string_view what) {
    if (reply.status < 200 || reply.status >= 300) {
        raise(ErrorCode::HttpError, std::string(what) + " returned HTTP " + std::to_string(reply.status),
              reply.status);
    }
}

}  // namespace unvd::chain::http
