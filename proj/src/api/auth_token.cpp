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

#include "unvd/api/auth_token.hpp"

#include <algorithm>

#include <json.hpp>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "unvd/common/error.hpp"
#include "unvd/embedding/base64.hpp"

namespace unvd::api {

namespace {

constexpr std::string_view kHeader = R"({"alg":"HS256","typ":"JWT"})";

[[noreturn]] void reject(const std::string& why) { raise(ErrorCode::Unauthorized, "invalid token: " + why); }

}  // namespace

std::string base64url_encode(std::string_view bytes) {
    std::string s = embedding::base64_encode(bytes);
    while (!s.empty() && s.back() == '=') {
        s.pop_back();
    }
    std::replace(s.begin(), s.end(), '+', '-');
    std::replace(s.begin(), s.end(), '/', '_');
    return s;
}

std::string base64url_decode(std::string_view text) {
    std::string s(text);
    for (char& c : s) {
        if (c == '+' || c == '/' || c == '=') {
            raise(ErrorCode::Base64Error, "base64url text holds a standard-alphabet or padding character");
        }
        if (c == '-') {
            c = '+';
        } else if (c == '_') {
            c = '/';
        }
    }
    if (s.empty()) {
        return s;
    }
    if (s.size() % 4 == 1) {
        raise(ErrorCode::Base64Error, "base64url text has an impossible length");
    }
    s.append((4 - s.size() % 4) % 4, '=');
    return embedding::base64_decode(s);
}

bool constant_time_equal(std::string_view a, std::string_view b) {
    return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

TokenSigner::TokenSigner(std::string secret, std::shared_ptr<Clock> clock)
    : secret_(std::move(secret)), clock_(std::move(clock)) {
    if (secret_.size() < 16) {
        raise(ErrorCode::InvalidConfig, "token secret must be at least 16 bytes");
    }
}

std::string TokenSigner::sign(std::string_view signing_input) const {
    unsigned char mac[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), secret_.data(), static_cast<int>(secret_.size()),
             reinterpret_cast<const unsigned char*>(signing_input.data()), signing_input.size(), mac, &len) ==
        nullptr) {
        raise(ErrorCode::IoError, "HMAC-SHA256 failed");
    }
    return std::string(reinterpret_cast<const char*>(mac), len);
}

std::string TokenSigner::issue(std::string_view subject, std::chrono::seconds lifetime) const {
    const std::int64_t now = clock_->now_ms() / 1000;
    nlohmann::json payload{{"sub", subject}, {"iat", now}, {"exp", now + lifetime.count()}};
    std::string input = base64url_encode(kHeader) + "." + base64url_encode(payload.dump());
    return input + "." + base64url_encode(sign(input));
}

TokenClaims TokenSigner::verify(std::string_view token) const {
    const auto first = token.find('.');
    const auto second = first == std::string_view::npos ? first : token.find('.', first + 1);
    if (second == std::string_view::npos || token.find('.', second + 1) != std::string_view::npos) {
        reject("expected three dot-separated parts");
    }
    const auto signing_input = token.substr(0, second);
    std::string header_raw;
    std::string payload_raw;
    std::string signature;
    try {
        header_raw = base64url_decode(token.substr(0, first));
        payload_raw = base64url_decode(token.substr(first + 1, second - first - 1));
        signature = base64url_decode(token.substr(second + 1));
    } catch (const Error&) {
        reject("bad base64url");
    }
    if (!constant_time_equal(signature, sign(signing_input))) {
        reject("signature mismatch");
    }
    const auto header = nlohmann::json::parse(header_raw, nullptr, false);
    if (!header.is_object() || header.value("alg", "") != "HS256") {
        reject("unsupported algorithm");
    }
    const auto payload = nlohmann::json::parse(payload_raw, nullptr, false);
    if (!payload.is_object() || !payload.contains("sub") || !payload["sub"].is_string() ||
        !payload.contains("exp") || !payload["exp"].is_number_integer()) {
        reject("missing claims");
    }
    TokenClaims claims;
    claims.subject = payload["sub"].get<std::string>();
    claims.expires_at = payload["exp"].get<std::int64_t>();
    if (payload.contains("iat") && payload["iat"].is_number_integer()) {
        claims.issued_at = payload["iat"].get<std::int64_t>();
    }
    if (clock_->now_ms() / 1000 >= claims.expires_at) {
        reject("expired");
    }
    return claims;
}

}  // namespace unvd::api
