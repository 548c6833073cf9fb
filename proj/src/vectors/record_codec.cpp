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

#include "record_codec.hpp"

#include <algorithm>
#include <cstring>

namespace unvd::vectors::codec {

namespace {

[[noreturn]] void corrupt(const std::string& what, std::uint64_t offset) {
    raise(ErrorCode::CorruptFile, what + " at byte offset " + std::to_string(offset),
          static_cast<std::int64_t>(offset));
}

void check_magic(BinaryReader& r, std::string_view magic) {
    const auto at = r.offset();
    if (r.remaining() < magic.size() || r.get_bytes(magic.size()) != magic) {
        corrupt("bad magic", at);
    }
    const auto version_at = r.offset();
    const auto version = r.get<std::uint16_t>();
    if (version != kFormatVersion) {
        corrupt("unsupported format version " + std::to_string(version), version_at);
    }
}

}  // namespace

void encode_record(BinaryWriter& w, const VectorRecord& rec) {
    w.put_str16(rec.id);
    if (rec.metadata.size() > 0xffff) {
        raise(ErrorCode::InvalidArgument, "too many metadata entries");
    }
    w.put<std::uint16_t>(static_cast<std::uint16_t>(rec.metadata.size()));
    for (const auto& [k, v] : rec.metadata) {
        w.put_str16(k);
        w.put_str16(v);
    }
    w.put_bytes(std::string_view(reinterpret_cast<const char*>(rec.vector.data()),
                                 rec.vector.size() * sizeof(float)));
}

VectorRecord decode_record(BinaryReader& r, std::uint32_t dimension) {
    VectorRecord rec;
    const auto id_at = r.offset();
    rec.id = r.get_str16();
    if (rec.id.empty()) {
        corrupt("empty record id", id_at);
    }
    const auto n_meta = r.get<std::uint16_t>();
    for (std::uint16_t i = 0; i < n_meta; ++i) {
        auto key = r.get_str16();
        auto value = r.get_str16();
        rec.metadata.emplace(std::move(key), std::move(value));
    }
    const auto raw = r.get_bytes(static_cast<std::size_t>(dimension) * sizeof(float));
    rec.vector.resize(dimension);
    std::memcpy(rec.vector.data(), raw.data(), raw.size());
    return rec;
}

std::string encode_snapshot(std::uint32_t dimension,
                            const std::vector<const VectorRecord*>& records) {
    std::string out;
    BinaryWriter w(out);
    w.put_bytes(kSnapshotMagic);
    w.put<std::uint16_t>(kFormatVersion);
    w.put<std::uint32_t>(dimension);
    w.put<std::uint64_t>(records.size());
    for (const auto* rec : records) {
        encode_record(w, *rec);
    }
    return out;
}

Snapshot decode_snapshot(std::string_view bytes) {
    BinaryReader r(bytes);
    check_magic(r, kSnapshotMagic);
    Snapshot snap;
    snap.dimension = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    // A lying count must not drive the allocation; truncation is caught per record.
    const std::uint64_t min_record = 5 + static_cast<std::uint64_t>(snap.dimension) * 4;
    snap.records.reserve(std::min<std::uint64_t>(count, r.remaining() / min_record));
    for (std::uint64_t i = 0; i < count; ++i) {
        snap.records.push_back(decode_record(r, snap.dimension));
    }
    if (!r.at_end()) {
        corrupt("trailing bytes after last record", r.offset());
    }
    return snap;
}

std::string encode_log_header(std::uint32_t dimension) {
    std::string out;
    BinaryWriter w(out);
    w.put_bytes(kLogMagic);
    w.put<std::uint16_t>(kFormatVersion);
    w.put<std::uint32_t>(dimension);
    return out;
}

std::string encode_log_upsert(const VectorRecord& rec) {
    std::string out;
    BinaryWriter w(out);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(LogOp::upsert));
    encode_record(w, rec);
    return out;
}

std::string encode_log_tombstone(std::string_view id) {
    std::string out;
    BinaryWriter w(out);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(LogOp::tombstone));
    w.put_str16(id);
    return out;
}

std::uint32_t decode_log_header(std::string_view bytes) {
    BinaryReader r(bytes);
    check_magic(r, kLogMagic);
    return r.get<std::uint32_t>();
}

std::vector<LogEntry> decode_log_entries(std::string_view bytes, std::uint64_t base,
                                         std::uint32_t dimension) {
    BinaryReader r(bytes, base);
    std::vector<LogEntry> entries;
    while (!r.at_end()) {
        const auto op_at = r.offset();
        const auto op = r.get<std::uint8_t>();
        if (op == static_cast<std::uint8_t>(LogOp::upsert)) {
            entries.emplace_back(decode_record(r, dimension));
        } else if (op == static_cast<std::uint8_t>(LogOp::tombstone)) {
            entries.emplace_back(Tombstone{r.get_str16()});
        } else {
            corrupt("unknown log op " + std::to_string(op), op_at);
        }
    }
    return entries;
}

}  // namespace unvd::vectors::codec
