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
#include <optional>
#include <string>
#include <string_view>

#include "unvd/common/error.hpp"
#include "unvd/common/ids.hpp"

namespace unvd::tasks::detail {

/// Non-zero lease number; random so that processes sharing a durable queue
/// never mint the same one.
inline std::uint64_t random_lease() {
    std::uint64_t v = 0;
    while (v == 0) {
        v = std::stoull(random_hex_id(8), nullptr, 16);
    }
    return v;
}

inline std::string make_token(std::string_view message_id, std::uint64_t lease) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(message_id);
    out.push_back('#');
    for (int shift = 60; shift >= 0; shift -= 4) {
        out.push_back(kHex[(lease >> shift) & 0xf]);
    }
    return out;
}

/// Extracts the lease number; raises ExpiredReceipt for a token that does not
/// belong to `message_id`.
inline std::uint64_t lease_of(std::string_view message_id, std::string_view token) {
    const auto hash = token.rfind('#');
    if (hash == std::string_view::npos || token.substr(0, hash) != message_id ||
        token.size() - hash - 1 != 16) {
        raise(ErrorCode::ExpiredReceipt, "receipt does not match message " + std::string(message_id));
    }
    std::uint64_t lease = 0;
    for (char c : token.substr(hash + 1)) {
        lease <<= 4;
        if (c >= '0' && c <= '9') lease |= static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') lease |= static_cast<std::uint64_t>(c - 'a' + 10);
        else raise(ErrorCode::ExpiredReceipt, "malformed receipt token");
    }
    return lease;
}

}  // namespace unvd::tasks::detail
