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
#include <vector>

namespace unvd::embedding {

inline constexpr std::size_t kDefaultMediaCap = 25u * 1024 * 1024;

struct MediaBlob {
    std::string bytes;
    std::string mime;
    std::string source_url;
};

/// Row-major 8-bit RGB.
struct PixelGrid {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> rgb;

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    const std::uint8_t* at(std::uint32_t row, std::uint32_t col) const {
        return rgb.data() + (static_cast<std::size_t>(row) * width + col) * 3;
    }
    bool operator==(const PixelGrid&) const = default;
};

struct DecodeLimits {
    std::size_t max_bytes = kDefaultMediaCap;
    std::uint64_t max_pixels = 64ull * 1024 * 1024;
};

/// "image/png", "image/jpeg", "image/gif", "image/webp", "image/bmp" or
/// "application/octet-stream", from magic bytes only.
std::string sniff_mime(std::string_view bytes);

/// Decodes PNG or JPEG at native resolution. Alpha is dropped, gray is
/// expanded to RGB, 16-bit channels are reduced to 8. Throws TooLarge,
/// UnsupportedFormat or DecodeError.
PixelGrid decode_media(std::string_view bytes, const DecodeLimits& limits = {});
inline PixelGrid decode_media(const MediaBlob& blob, const DecodeLimits& limits = {}) {
    return decode_media(blob.bytes, limits);
}

/// Lossless 8-bit RGB PNG.
std::string encode_png(const PixelGrid& grid);

/// SHA-256 hex of the raw rgb buffer.
std::string pixel_checksum(const PixelGrid& grid);

}  // namespace unvd::embedding
