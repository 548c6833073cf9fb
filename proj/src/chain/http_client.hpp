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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "unvd/chain/provider.hpp"

namespace unvd::chain::http {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string target;  // path plus query, at least "/"
};

/// Accepts http and https URLs only; throws InvalidArgument otherwise.
Url parse_url(std::string_view url);

struct Reply {
    int status = 0;
    std::string body;
    std::string content_type;
};

struct Request {
    std::string method = "GET";
    std::string url;
    std::string body;
    std::string content_type = "application/json";
    std::map<std::string, std::string> headers;
    Millis timeout{10000};
    std::optional<std::size_t> max_body;
};

/// Performs one request. Any HTTP status is returned as a Reply. Throws
/// FetchTimeout when the deadline passes, TooLarge when the body exceeds
/// max_body, ProviderUnavailable when the peer cannot be reached.
Reply send(const Request& req);

/// Raises HttpError(status) unless status is 2xx.
void expect_ok(const Reply& reply, std::string_view what);

}  // namespace unvd::chain::http
