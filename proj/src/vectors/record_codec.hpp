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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unvd/common/binary_io.hpp"
#include "unvd/vectors/vector_store.hpp"

namespace unvd::vectors::codec {

inline constexpr std::string_view kSnapshotMagic = "UNVD";
inline constexpr std::string_view kLogMagic = "UNVL";
inline constexpr std::size_t kSnapshotHeaderSize = 4 + 2 + 4 + 8;
inline constexpr std::size_t kLogHeaderSize = 4 + 2 + 4;

enum class LogOp : std::uint8_t { upsert = 0, tombstone = 1 };

struct Tombstone {
    std::string id;
};

using LogEntry = std::variant<VectorRecord, Tombstone>;

void encode_record(BinaryWriter& w, const VectorRecord& rec);
VectorRecord decode_record(BinaryReader& r, std::uint32_t dimension);

std::string encode_snapshot(std::uint32_t dimension, const std::vector<const VectorRecord*>& records);

struct Snapshot {
    std::uint32_t dimension = 0;
    std::vector<VectorRecord> records;
};
Snapshot decode_snapshot(std::string_view bytes);

std::string encode_log_header(std::uint32_t dimension);
std::string encode_log_upsert(const VectorRecord& rec);
std::string encode_log_tombstone(std::string_view id);

/// Validates the header and returns the declared dimension.
std::uint32_t decode_log_header(std::string_view bytes);
/// Decodes every entry in `bytes`, which starts at absolute file offset `base`.
std::vector<LogEntry> decode_log_entries(std::string_view bytes, std::uint64_t base,
                                         std::uint32_t dimension);

}  // namespace unvd::vectors::codec
