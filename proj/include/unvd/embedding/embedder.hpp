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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "unvd/embedding/image_codec.hpp"

namespace unvd::embedding {

struct EmbedderDescriptor {
    std::string name;
    std::uint32_t dimension = 0;
    std::uint32_t version = 0;

    bool operator==(const EmbedderDescriptor&) const = default;
};

/// Maps a decoded image to a fixed-length vector. Implementations must be
/// pure and safe to call from many threads at once.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual const EmbedderDescriptor& descriptor() const = 0;
    virtual std::vector<float> embed(const PixelGrid& grid) const = 0;

    std::uint32_t dimension() const { return descriptor().dimension; }
};

/// Reference embedder, 2016 dimensions:
///
///   [0, 768)     per-channel mean of each cell of a 16x16 grid
///   [768, 1536)  per-channel population standard deviation of each cell
///   [1536, 2016) joint RGB histogram, 8x6x10 bins, summing to 1
///
/// Index of cell (i, j) and channel c in either moment block is
/// c * 256 + i * 16 + j. Histogram bin is (r8 * 6 + g6) * 10 + b10 with
/// channel quantised as floor(v * K / 256). The concatenation is
/// L2-normalised.
///
/// Cell rows span floor(i*H/16) .. floor((i+1)*H/16) - 1; when an image is
/// shorter than 16 rows that range would be empty, so the cell takes the
/// single row floor(i*H/16) instead. Columns work the same way.
class GridMomentEmbedder final : public Embedder {
public:
    static constexpr std::uint32_t kGrid = 16;
    static constexpr std::uint32_t kDimension = 2016;
    static constexpr std::uint32_t kMomentBlock = 3 * kGrid * kGrid;
    static constexpr std::uint32_t kHistBins = 8 * 6 * 10;

    const EmbedderDescriptor& descriptor() const override;
    std::vector<float> embed(const PixelGrid& grid) const override;
};

std::shared_ptr<const Embedder> default_embedder();

std::vector<float> embed_media(const Embedder& embedder, std::string_view bytes,
                               const DecodeLimits& limits = {});

/// Base64 (optionally a data: URL) -> decode_media -> embed.
std::vector<float> embed_base64(const Embedder& embedder, std::string_view text,
                                const DecodeLimits& limits = {});

}  // namespace unvd::embedding
