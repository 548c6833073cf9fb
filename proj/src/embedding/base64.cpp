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

#include "unvd/embedding/base64.hpp"

#include <openssl/evp.h>

#include "unvd/common/error.hpp"

namespace unvd::embedding {

namespace {

bool in_alphabet(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' ||
           c == '/';
}

[[noreturn]] void bad(const std::string& why) { raise(ErrorCode::Base64Error, "invalid base64: " + why); }

}  // namespace

std::string base64_encode(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string base64_decode(std::string_view text) {
    if (text.empty()) {
        bad("empty input");
    }
    if (text.size() % 4 != 0) {
        bad("length is not a multiple of 4");
    }
    std::size_t pad = 0;
    if (text.back() == '=') {
        pad = text[text.size() - 2] == '=' ? 2 : 1;
    }
    for (std::size_t i = 0; i < text.size() - pad; ++i) {
        if (!in_alphabet(text[i])) {
            bad("unexpected character at position " + std::to_string(i));
        }
    }
    // Padding bits must be zero so every byte string has one encoding.
    const auto last = text[text.size() - pad - 1];
    const auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        return c == '+' ? 62 : 63;
    };
    if ((pad == 1 && (value(last) & 0x3) != 0) || (pad == 2 && (value(last) & 0xf) != 0)) {
        bad("non-zero padding bits");
    }
    std::string out(text.size() / 4 * 3, '\0');
    const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0) {
        bad("decoder rejected input");
    }
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

std::string_view strip_data_url(std::string_view text) {
    if (text.rfind("data:", 0) != 0) {
        return text;
    }
    const auto marker = text.find(";base64,");
    if (marker == std::string_view::npos) {
        return text;
    }
    return text.substr(marker + 8);
}

}  // namespace unvd::embedding
