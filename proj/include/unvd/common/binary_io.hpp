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

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "unvd/common/error.hpp"

namespace unvd {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are little-endian; big-endian hosts need byte swapping");

/// Appends little-endian scalars and length-prefixed strings to a buffer.
class BinaryWriter {
public:
    explicit BinaryWriter(std::string& out) : out_(out) {}

    template <typename T>
    void put(T value) {
        char buf[sizeof(T)];
        std::memcpy(buf, &value, sizeof(T));
        out_.append(buf, sizeof(T));
    }

    void put_bytes(std::string_view bytes) { out_.append(bytes); }

    void put_str16(std::string_view s) {
        if (s.size() > 0xffff) {
            raise(ErrorCode::InvalidArgument, "string longer than 65535 bytes");
        }
        put<std::uint16_t>(static_cast<std::uint16_t>(s.size()));
        out_.append(s);
    }

    std::size_t size() const { return out_.size(); }

private:
    std::string& out_;
};

/// Bounds-checked reader. Truncation raises CorruptFile carrying the absolute
/// byte offset (base + position) where the read would have started.
class BinaryReader {
public:
    BinaryReader(std::string_view data, std::uint64_t base_offset = 0)
        : data_(data), base_(base_offset) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T value;
        std::memcpy(&value, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string_view get_bytes(std::size_t n) {
        need(n);
        auto view = data_.substr(pos_, n);
        pos_ += n;
        return view;
    }

    std::string get_str16() {
        const auto n = get<std::uint16_t>();
        return std::string(get_bytes(n));
    }

    bool at_end() const { return pos_ == data_.size(); }
    std::size_t position() const { return pos_; }
    std::uint64_t offset() const { return base_ + pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) {
            raise(ErrorCode::CorruptFile, "truncated data at byte offset " + std::to_string(offset()),
                  static_cast<std::int64_t>(offset()));
        }
    }

    std::string_view data_;
    std::uint64_t base_;
    std::size_t pos_ = 0;
};

}  // namespace unvd
