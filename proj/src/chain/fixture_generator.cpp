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

#include <algorithm>
#include <array>

#include "unvd/chain/fixture_set.hpp"
#include "unvd/common/digest.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/common/rng.hpp"
#include "unvd/embedding/image_codec.hpp"

namespace fs = std::filesystem;

namespace unvd::chain {

namespace {

using Rgb = std::array<int, 3>;

const std::vector<Rgb> kWarm{{230, 60, 40}, {245, 140, 30}, {250, 210, 60}, {200, 40, 90}, {180, 90, 40}};
const std::vector<Rgb> kCool{{30, 80, 200}, {40, 170, 210}, {60, 200, 150}, {90, 60, 190}, {20, 120, 120}};

std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

Rgb jitter(const Rgb& c, Rng& rng, int amount) {
    Rgb out{};
    for (int k = 0; k < 3; ++k) {
        out[k] = c[k] + static_cast<int>(rng.below(2 * amount + 1)) - amount;
    }
    return out;
}

embedding::PixelGrid paint(const std::vector<Rgb>& palette, std::uint32_t size, Rng& rng) {
    embedding::PixelGrid g{size, size, std::vector<std::uint8_t>(std::size_t{size} * size * 3)};
    const auto bg = jitter(palette[rng.below(palette.size())], rng, 15);
    std::vector<Rgb> canvas(std::size_t{size} * size, bg);
    const auto shapes = 3 + rng.below(4);
    for (std::uint64_t s = 0; s < shapes; ++s) {
        const auto colour = jitter(palette[rng.below(palette.size())], rng, 15);
        const auto x0 = rng.below(size), y0 = rng.below(size);
        const auto w = 4 + rng.below(size / 2), h = 4 + rng.below(size / 2);
        for (auto y = y0; y < std::min<std::uint64_t>(size, y0 + h); ++y) {
            for (auto x = x0; x < std::min<std::uint64_t>(size, x0 + w); ++x) {
                canvas[y * size + x] = colour;
            }
        }
    }
    for (std::size_t p = 0; p < canvas.size(); ++p) {
        for (int k = 0; k < 3; ++k) {
            g.rgb[p * 3 + k] = clamp8(canvas[p][k] + static_cast<int>(rng.below(17)) - 8);
        }
    }
    return g;
}

FixtureToken write_token(const fs::path& root, const std::string& contract, std::size_t index,
                         const std::string& file, const embedding::PixelGrid& grid) {
    const auto rel = fs::path("media") / file;
    write_file_atomic(root / rel, embedding::encode_png(grid));
    FixtureToken t;
    t.contract = contract;
    t.token_id = std::to_string(index);
    t.media = rel.string();
    t.width = grid.width;
    t.height = grid.height;
    t.pixel_sha256 = embedding::pixel_checksum(grid);
    return t;
}

}  // namespace

std::string derive_address(std::string_view label) {
    const auto digest = sha256({reinterpret_cast<const std::uint8_t*>(label.data()), label.size()});
    return "0x" + to_hex(digest).substr(0, 40);
}

FixtureSet generate_two_collections(const fs::path& root, const GeneratorOptions& opts) {
    fs::create_directories(root / "media");
    FixtureSet set;
    set.root = fs::absolute(root);
    Rng rng(opts.seed);
    const std::array<std::tuple<std::string, std::string, const std::vector<Rgb>*, char>, 2> collections{
        {{"unvd-fixture-warm", "Warm Tiles", &kWarm, 'a'}, {"unvd-fixture-cool", "Cool Tiles", &kCool, 'b'}}};
    for (const auto& [label, name, palette, prefix] : collections) {
        const auto address = derive_address(label);
        set.contracts.push_back({address, name});
        auto& list = set.tokens[address];
        for (std::uint32_t k = 0; k < opts.tokens_per_collection; ++k) {
            const auto grid = paint(*palette, opts.image_size, rng);
            list.push_back(write_token(set.root, address, k, std::string(1, prefix) + std::to_string(k) + ".png", grid));
        }
    }
    std::sort(set.contracts.begin(), set.contracts.end(),
              [](const auto& a, const auto& b) { return a.address < b.address; });
    set.save();
    return set;
}

FixtureSet generate_synthetic(const fs::path& root, const std::vector<std::size_t>& token_counts,
                              std::uint64_t seed) {
    fs::create_directories(root / "media");
    FixtureSet set;
    set.root = fs::absolute(root);
    Rng rng(seed);
    const auto grid = paint(kWarm, 8, rng);
    const auto shared = write_token(set.root, "", 0, "shared.png", grid);
    for (std::size_t c = 0; c < token_counts.size(); ++c) {
        const auto address = derive_address("synthetic-" + std::to_string(seed) + "-" + std::to_string(c));
        set.contracts.push_back({address, "Synthetic " + std::to_string(c)});
        auto& list = set.tokens[address];
        for (std::size_t k = 0; k < token_counts[c]; ++k) {
            auto t = shared;
            t.contract = address;
            t.token_id = std::to_string(k);
            list.push_back(std::move(t));
        }
    }
    std::sort(set.contracts.begin(), set.contracts.end(),
              [](const auto& a, const auto& b) { return a.address < b.address; });
    set.save();
    return set;
}

}  // namespace unvd::chain
