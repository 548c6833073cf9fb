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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "unvd/common/error.hpp"
#include "unvd/embedding/base64.hpp"
#include "unvd/embedding/embedder.hpp"
#include "unvd/embedding/image_codec.hpp"
#include "unvd/vectors/vector_store.hpp"

using namespace unvd;
using namespace unvd::embedding;

namespace {

// Constants below come from tests/oracles/embedding_oracle.py (Pillow encoder,
// numpy statistics).
constexpr std::string_view kRedPngB64 =
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAIAAACQd1PeAAAADElEQVR4nGP4z8AAAAMBAQDJ/pLvAAAAAElFTkSuQmCC";
constexpr std::string_view kGrayAlphaPngB64 =
    "iVBORw0KGgoAAAANSUhEUgAAAAIAAAACCAQAAADYv8WvAAAAEklEQVR4nGPk+s/FyCLSyPUfAAusArgD+42qAAAAAElFTkSuQmCC";
constexpr std::string_view kPalettePngB64 =
    "iVBORw0KGgoAAAANSUhEUgAAAAQAAAAEAgMAAADUn3btAAAADFBMVEVW2AZIdAVVSQYfBwLbu08XAAAAEElEQVR4nGO4xMTAxMB0AAAGngGZGxHycwAAAABJRU5ErkJggg==";
const std::vector<std::uint8_t> kPalettePixels{
    31, 7, 2, 72, 116, 5, 86, 216, 6, 85, 73, 6, 31, 7, 2, 72, 116, 5, 86, 216, 6, 85, 73, 6,
    31, 7, 2, 72, 116, 5, 86, 216, 6, 85, 73, 6, 85, 73, 6, 72, 116, 5, 86, 216, 6, 85, 73, 6};

struct OraclePick {
    std::size_t index;
    double value;
};

const std::vector<OraclePick> kPattern20x13{
    {5, 0.018478239034175205},     {100, 0.0032608657119132713}, {255, 0.037364086282339566},
    {300, 0.0019021716652827415},  {600, 0.011413029991696449},  {767, 0.026766272718621434},
    {800, 0.0},                    {1535, 0.0050271679725329595}, {1536, 3.1354477999166073e-06},
    {2014, 1.045149266638869e-06},
};
const std::vector<OraclePick> kPattern5x3{
    {5, 0.0},                     {100, 0.011040566510026247}, {255, 0.05627127447045635},
    {300, 0.08048929133115909},   {600, 0.0007122946135500804}, {767, 0.006410651521950724},
    {1536, 4.748630757000536e-05}, {1826, 2.374315378500268e-05},
};
const std::vector<OraclePick> kPattern40x37{
    {5, 0.05331982418885272},     {100, 0.032851076514459024},  {255, 0.04551418378627186},
    {300, 0.0329774268087454},    {600, 0.04754982741644133},   {767, 0.02889210062681909},
    {800, 0.00446715749474079},   {1000, 0.00446715749474079},  {1300, 0.0012500948248108886},
    {1535, 0.018548215550600666}, {1536, 6.829745637101668e-07}, {2015, 3.414872818550834e-07},
};

PixelGrid pattern(std::uint32_t h, std::uint32_t w) {
    PixelGrid g{w, h, std::vector<std::uint8_t>(std::size_t{w} * h * 3)};
    for (std::uint32_t r = 0; r < h; ++r) {
        for (std::uint32_t c = 0; c < w; ++c) {
            auto* px = g.rgb.data() + (std::size_t{r} * w + c) * 3;
            px[0] = static_cast<std::uint8_t>((r * 31 + c * 17) % 256);
            px[1] = static_cast<std::uint8_t>((r * 7 + c * 113) % 256);
            px[2] = static_cast<std::uint8_t>((r * r + c) % 256);
        }
    }
    return g;
}

PixelGrid random_grid(std::uint32_t h, std::uint32_t w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    PixelGrid g{w, h, std::vector<std::uint8_t>(std::size_t{w} * h * 3)};
    for (auto& b : g.rgb) {
        b = static_cast<std::uint8_t>(rng());
    }
    return g;
}

PixelGrid upscale2x(const PixelGrid& g) {
    PixelGrid out{g.width * 2, g.height * 2, {}};
    out.rgb.resize(out.pixel_count() * 3);
    for (std::uint32_t r = 0; r < out.height; ++r) {
        for (std::uint32_t c = 0; c < out.width; ++c) {
            std::memcpy(out.rgb.data() + (std::size_t{r} * out.width + c) * 3, g.at(r / 2, c / 2), 3);
        }
    }
    return out;
}

double l2(const std::vector<float>& v) {
    double s = 0;
    for (float x : v) {
        s += double{x} * x;
    }
    return std::sqrt(s);
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an unvd::Error";
    return ErrorCode::InvalidArgument;
}

const GridMomentEmbedder kEmbedder;

}  // namespace

TEST(Base64, RoundTripAllLengths) {
    std::mt19937_64 rng(3);
    for (std::size_t n = 1; n < 64; ++n) {
        std::string bytes(n, '\0');
        for (auto& b : bytes) {
            b = static_cast<char>(rng());
        }
        EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
    }
    EXPECT_EQ(base64_encode("hello"), "aGVsbG8=");
}

TEST(Base64, StrictRejections) {
    for (std::string_view bad : {"not-base64!!", "", "aGVsbG8", "aGVsbG9=", "aGVs bG8=", "aGVsbG8=\n",
                                 "aGVs_G8=", "=GVsbG8=", "aGVsbG==", "aGV=bG8="}) {
        EXPECT_EQ(code_of([&] { base64_decode(bad); }), ErrorCode::Base64Error) << bad;
    }
}

TEST(Base64, DataUrlPrefix) {
    EXPECT_EQ(strip_data_url("data:image/png;base64,AAAA"), "AAAA");
    EXPECT_EQ(strip_data_url("AAAA"), "AAAA");
}

TEST(DecodeMedia, OneByOneRedPng) {
    const auto grid = decode_media(base64_decode(kRedPngB64));
    EXPECT_EQ(grid.width, 1u);
    EXPECT_EQ(grid.height, 1u);
    EXPECT_EQ(grid.rgb, (std::vector<std::uint8_t>{255, 0, 0}));
}

TEST(DecodeMedia, TextIsUnsupported) {
    EXPECT_EQ(code_of([] { decode_media("hello"); }), ErrorCode::UnsupportedFormat);
    EXPECT_EQ(code_of([] { decode_media(""); }), ErrorCode::UnsupportedFormat);
    EXPECT_EQ(code_of([] { decode_media("GIF89a\x01\x00\x01\x00"); }), ErrorCode::UnsupportedFormat);
}

TEST(DecodeMedia, CorruptPngIsDecodeError) {
    auto bytes = base64_decode(kRedPngB64);
    EXPECT_EQ(code_of([&] { decode_media(bytes.substr(0, bytes.size() - 20)); }), ErrorCode::DecodeError);
    bytes[bytes.size() - 20] ^= 0x55;  // damages the IDAT CRC
    EXPECT_EQ(code_of([&] { decode_media(bytes); }), ErrorCode::DecodeError);
    EXPECT_EQ(code_of([] { decode_media(std::string("\xff\xd8\xff\xe0garbage", 11)); }),
              ErrorCode::DecodeError);
}

TEST(DecodeMedia, SizeCaps) {
    const auto bytes = encode_png(pattern(64, 64));
    EXPECT_EQ(code_of([&] { decode_media(bytes, DecodeLimits{bytes.size() - 1}); }), ErrorCode::TooLarge);
    EXPECT_EQ(code_of([&] { decode_media(bytes, DecodeLimits{kDefaultMediaCap, 4095}); }),
              ErrorCode::TooLarge);
    EXPECT_NO_THROW(decode_media(bytes, DecodeLimits{bytes.size(), 4096}));
}

TEST(DecodeMedia, GrayAlphaAndPaletteExpandToRgb) {
    const auto ga = decode_media(base64_decode(kGrayAlphaPngB64));
    EXPECT_EQ(ga.rgb, (std::vector<std::uint8_t>{10, 10, 10, 20, 20, 20, 30, 30, 30, 40, 40, 40}));
    const auto pal = decode_media(base64_decode(kPalettePngB64));
    EXPECT_EQ(pal.width, 4u);
    EXPECT_EQ(pal.rgb, kPalettePixels);
}

TEST(DecodeMedia, PngRoundTripPreservesChecksum) {
    const auto grid = random_grid(64, 64, 9);
    const auto decoded = decode_media(encode_png(grid));
    EXPECT_EQ(decoded, grid);
    EXPECT_EQ(pixel_checksum(decoded), pixel_checksum(grid));
    EXPECT_EQ(sniff_mime(encode_png(grid)), "image/png");
}

TEST(Embed, DescriptorAndDimension) {
    EXPECT_EQ(kEmbedder.descriptor(), (EmbedderDescriptor{"grid-moment-v1", 2016, 1}));
    for (auto [h, w] : {std::pair{1u, 1u}, {3u, 700u}, {17u, 16u}, {100u, 9u}}) {
        EXPECT_EQ(kEmbedder.embed(random_grid(h, w, h * w)).size(), 2016u);
    }
}

TEST(Embed, UniformGrayClosedForm) {
    PixelGrid g{32, 32, std::vector<std::uint8_t>(32 * 32 * 3, 128)};
    const auto v = kEmbedder.embed(g);
    // 768 means of 128, 768 zero deviations, one histogram bin holding mass 1.
    const double norm = std::sqrt(768.0 * 128 * 128 + 1.0);
    for (std::size_t k = 0; k < 768; ++k) {
        ASSERT_FLOAT_EQ(v[k], static_cast<float>(128 / norm));
        ASSERT_EQ(v[768 + k], 0.0f);
    }
    const std::size_t bin = 1536 + (4 * 6 + 3) * 10 + 5;
    for (std::size_t k = 1536; k < 2016; ++k) {
        ASSERT_EQ(v[k] != 0.0f, k == bin) << k;
    }
    EXPECT_FLOAT_EQ(v[bin], static_cast<float>(1 / norm));
    EXPECT_NEAR(l2(v), 1.0, 1e-6);
}

TEST(Embed, MatchesIndependentOracle) {
    const std::vector<std::tuple<std::uint32_t, std::uint32_t, const std::vector<OraclePick>*>> cases{
        {20, 13, &kPattern20x13}, {5, 3, &kPattern5x3}, {40, 37, &kPattern40x37}};
    for (const auto& [h, w, picks] : cases) {
        const auto v = kEmbedder.embed(pattern(h, w));
        for (const auto& p : *picks) {
            EXPECT_NEAR(v[p.index], p.value, 1e-7) << h << "x" << w << " index " << p.index;
        }
    }
}

TEST(Embed, DeterministicBitIdentical) {
    const auto bytes = encode_png(random_grid(50, 70, 5));
    const auto a = embed_media(kEmbedder, bytes);
    const auto b = embed_media(kEmbedder, bytes);
    EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)), 0);
}

TEST(Embed, NearestNeighbourUpscaleIsClose) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto g = random_grid(64, 64, seed);
        const auto d = vectors::cosine_distance(kEmbedder.embed(g), kEmbedder.embed(upscale2x(g)));
        EXPECT_LE(d, 1e-3);
    }
}

TEST(Embed, Base64Composition) {
    const auto bytes = base64_decode(kRedPngB64);
    EXPECT_EQ(embed_base64(kEmbedder, kRedPngB64), embed_media(kEmbedder, bytes));
    EXPECT_EQ(embed_base64(kEmbedder, "data:image/png;base64," + std::string(kRedPngB64)),
              embed_media(kEmbedder, bytes));
    EXPECT_EQ(code_of([] { embed_base64(kEmbedder, "not-base64!!"); }), ErrorCode::Base64Error);
    EXPECT_EQ(code_of([] { embed_base64(kEmbedder, base64_encode("hello")); }),
              ErrorCode::UnsupportedFormat);
}

TEST(EmbedProperty, UnitNormForRandomImages) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        const auto h = 1 + static_cast<std::uint32_t>(rng() % 90);
        const auto w = 1 + static_cast<std::uint32_t>(rng() % 90);
        auto g = random_grid(h, w, rng());
        if (trial % 3 == 0) {
            std::fill(g.rgb.begin(), g.rgb.end(), static_cast<std::uint8_t>(rng()));
        }
        const auto v = kEmbedder.embed(g);
        ASSERT_NEAR(l2(v), 1.0, 1e-6) << h << "x" << w;
        ASSERT_TRUE(std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x) && x >= 0; }));
    }
}

TEST(EmbedProperty, PermutingPixelsWithinACellIsInvisible) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto h = 16 + static_cast<std::uint32_t>(rng() % 80);
        const auto w = 16 + static_cast<std::uint32_t>(rng() % 80);
        const auto g = random_grid(h, w, rng());
        auto shuffled = g;
        for (std::uint32_t i = 0; i < 16; ++i) {
            for (std::uint32_t j = 0; j < 16; ++j) {
                const auto r0 = i * h / 16, r1 = (i + 1) * h / 16;
                const auto c0 = j * w / 16, c1 = (j + 1) * w / 16;
                std::vector<std::size_t> cells;
                for (auto r = r0; r < r1; ++r) {
                    for (auto c = c0; c < c1; ++c) {
                        cells.push_back(std::size_t{r} * w + c);
                    }
                }
                auto order = cells;
                std::shuffle(order.begin(), order.end(), rng);
                for (std::size_t k = 0; k < cells.size(); ++k) {
                    std::memcpy(shuffled.rgb.data() + cells[k] * 3, g.rgb.data() + order[k] * 3, 3);
                }
            }
        }
        ASSERT_NE(shuffled, g);
        ASSERT_EQ(kEmbedder.embed(shuffled), kEmbedder.embed(g));
    }
}

TEST(EmbedProperty, DistinctImagesAreApart) {
    const auto warm = kEmbedder.embed(PixelGrid{8, 8, std::vector<std::uint8_t>(192, 200)});
    auto cool_grid = PixelGrid{8, 8, std::vector<std::uint8_t>(192, 0)};
    for (std::size_t k = 2; k < cool_grid.rgb.size(); k += 3) {
        cool_grid.rgb[k] = 220;
    }
    EXPECT_GT(vectors::cosine_distance(warm, kEmbedder.embed(cool_grid)), 0.1);
}
