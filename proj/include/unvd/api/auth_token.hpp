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

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "unvd/common/clock.hpp"

namespace unvd::api {

struct TokenClaims {
    std::string subject;
    std::int64_t issued_at = 0;  // seconds since the epoch
    std::int64_t expires_at = 0;
};

/// Compact JWS tokens (header.payload.signature, base64url without padding)
/// signed with HMAC-SHA256. Only {"alg":"HS256"} is accepted.
class TokenSigner {
public:
    /// Throws InvalidConfig for a secret shorter than 16 bytes.
    explicit TokenSigner(std::string secret, std::shared_ptr<Clock> clock = system_clock());

    /// A negative lifetime yields an already expired token.
    std::string issue(std::string_view subject, std::chrono::seconds lifetime = std::chrono::hours(1)) const;

    /// Throws Unauthorized if the token is malformed, carries a bad
    /// signature, names another algorithm or has expired.
    TokenClaims verify(std::string_view token) const;

private:
    std::string sign(std::string_view signing_input) const;

    std::string secret_;
    std::shared_ptr<Clock> clock_;
};

std::string base64url_encode(std::string_view bytes);
/// Strict: URL-safe alphabet, no padding, no stray characters. Throws Base64Error.
std::string base64url_decode(std::string_view text);

/// Length-independent comparison time for equal-length inputs.
bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace unvd::api
