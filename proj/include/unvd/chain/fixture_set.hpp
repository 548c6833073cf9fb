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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unvd::chain {

struct FixtureContract {
    std::string address;
    std::string name;
};

struct FixtureToken {
    std::string contract;
    std::string token_id;
    std::string media;  // path relative to the fixture root, or an absolute URL
    std::optional<std::string> metadata_url;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::string pixel_sha256;
};

/// A fixture directory: manifest.ndjson plus media/. Each manifest line is an
/// object with "type" set to "contract" or "token".
struct FixtureSet {
    std::filesystem::path root;
    std::vector<FixtureContract> contracts;                   // address ascending
    std::map<std::string, std::vector<FixtureToken>> tokens;  // by contract, token id ascending

    static FixtureSet load(const std::filesystem::path& root);
    void save() const;

    std::size_t token_count() const;
    /// file:// URL for relative media, the media string itself otherwise.
    std::string media_url(const FixtureToken& token) const;
    std::filesystem::path media_path(const FixtureToken& token) const;
};

struct GeneratorOptions {
    std::uint32_t tokens_per_collection = 25;
    std::uint32_t image_size = 64;
    std::uint64_t seed = 2023;
};

/// Two collections with disjoint palettes ("warm" and "cool"), each token a
/// PNG under media/ named a<k>.png or b<k>.png.
FixtureSet generate_two_collections(const std::filesystem::path& root, const GeneratorOptions& opts = {});

/// One contract per entry of `token_counts`, holding that many tokens. All
/// tokens share a single small PNG, so large fixtures stay cheap.
FixtureSet generate_synthetic(const std::filesystem::path& root,
                              const std::vector<std::size_t>& token_counts, std::uint64_t seed = 7);

/// Deterministic lowercase contract address derived from a label.
std::string derive_address(std::string_view label);

}  // namespace unvd::chain
