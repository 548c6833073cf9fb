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

#include "unvd/embedding/embedder.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "unvd/common/error.hpp"
#include "unvd/embedding/base64.hpp"

namespace unvd::embedding {

namespace {

struct Span {
    std::uint32_t begin;
    std::uint32_t end;
};

std::array<Span, GridMomentEmbedder::kGrid> partition(std::uint32_t extent) {
    constexpr auto g = GridMomentEmbedder::kGrid;
    std::array<Span, g> spans{};
    for (std::uint32_t i = 0; i < g; ++i) {
        const auto begin = static_cast<std::uint32_t>(std::uint64_t{i} * extent / g);
        const auto end = static_cast<std::uint32_t>(std::uint64_t{i + 1} * extent / g);
        spans[i] = {begin, std::max(end, begin + 1)};
    }
    return spans;
}

}  // namespace

const EmbedderDescriptor& GridMomentEmbedder::descriptor() const {
    static const EmbedderDescriptor d{"grid-moment-v1", kDimension, 1};
    return d;
}

std::vector<float> GridMomentEmbedder::embed(const PixelGrid& grid) const {
    if (grid.width == 0 || grid.height == 0 || grid.rgb.size() != grid.pixel_count() * 3) {
        raise(ErrorCode::InvalidArgument, "pixel grid is empty or inconsistent");
    }
    std::vector<double> out(kDimension, 0.0);
    const auto rows = partition(grid.height);
    const auto cols = partition(grid.width);

    // Integer sums keep the statistics independent of pixel visiting order.
    for (std::uint32_t i = 0; i < kGrid; ++i) {
        for (std::uint32_t j = 0; j < kGrid; ++j) {
            std::array<std::uint64_t, 3> sum{};
            std::array<unsigned __int128, 3> sum_sq{};
            std::uint64_t n = 0;
            for (auto r = rows[i].begin; r < rows[i].end; ++r) {
                for (auto c = cols[j].begin; c < cols[j].end; ++c) {
                    const auto* px = grid.at(r, c);
                    for (int ch = 0; ch < 3; ++ch) {
                        sum[ch] += px[ch];
                        sum_sq[ch] += std::uint64_t{px[ch]} * px[ch];
                    }
                    ++n;
                }
            }
            for (std::uint32_t ch = 0; ch < 3; ++ch) {
                const auto idx = ch * kGrid * kGrid + i * kGrid + j;
                const double nd = static_cast<double>(n);
                out[idx] = static_cast<double>(sum[ch]) / nd;
                // n * sum_sq - sum^2 is exact and non-negative.
                const auto num = static_cast<unsigned __int128>(n) * sum_sq[ch] -
                                 static_cast<unsigned __int128>(sum[ch]) * sum[ch];
                out[kMomentBlock + idx] = std::sqrt(static_cast<double>(num)) / nd;
            }
        }
    }

    std::vector<std::uint64_t> hist(kHistBins, 0);
    const auto* p = grid.rgb.data();
    for (std::size_t k = 0; k < grid.pixel_count(); ++k, p += 3) {
        const auto rq = p[0] * 8u / 256u;
        const auto gq = p[1] * 6u / 256u;
        const auto bq = p[2] * 10u / 256u;
        ++hist[(rq * 6 + gq) * 10 + bq];
    }
    const double mass = static_cast<double>(grid.pixel_count());
    for (std::uint32_t b = 0; b < kHistBins; ++b) {
        out[2 * kMomentBlock + b] = static_cast<double>(hist[b]) / mass;
    }

    double norm_sq = 0.0;
    for (double v : out) {
        norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    std::vector<float> result(kDimension);
    for (std::uint32_t k = 0; k < kDimension; ++k) {
        result[k] = static_cast<float>(out[k] / norm);
    }
    return result;
}

std::shared_ptr<const Embedder> default_embedder() {
    static const auto instance = std::make_shared<const GridMomentEmbedder>();
    return instance;
}

std::vector<float> embed_media(const Embedder& embedder, std::string_view bytes,
                               const DecodeLimits& limits) {
    return embedder.embed(decode_media(bytes, limits));
}

std::vector<float> embed_base64(const Embedder& embedder, std::string_view text,
                                const DecodeLimits& limits) {
    return embed_media(embedder, base64_decode(strip_data_url(text)), limits);
}

}  // namespace unvd::embedding
