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

#include "unvd/chain/fixture_set.hpp"

#include <algorithm>

#include <json.hpp>

#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/meta/records.hpp"

namespace fs = std::filesystem;

namespace unvd::chain {

namespace {

constexpr const char* kManifest = "manifest.ndjson";

bool is_absolute_url(std::string_view s) { return s.find("://") != std::string_view::npos; }

}  // namespace

FixtureSet FixtureSet::load(const fs::path& root) {
    const auto path = root / kManifest;
    if (!fs::exists(path)) {
        raise(ErrorCode::IoError, "no fixture manifest at " + path.string());
    }
    const auto text = read_file(path);
    FixtureSet set;
    set.root = fs::absolute(root);
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            nl = text.size();
        }
        const std::string_view line(text.data() + pos, nl - pos);
        const auto at = static_cast<std::int64_t>(pos);
        pos = nl + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "contract") {
                FixtureContract c{j.at("address").get<std::string>(), j.value("name", std::string())};
                if (!meta::is_valid_address(c.address)) {
                    raise(ErrorCode::SchemaViolation, "bad contract address " + c.address, at);
                }
                set.contracts.push_back(std::move(c));
            } else if (type == "token") {
                FixtureToken t;
                t.contract = j.at("contract").get<std::string>();
                t.token_id = j.at("token_id").get<std::string>();
                t.media = j.at("media").get<std::string>();
                if (j.contains("metadata_url") && !j.at("metadata_url").is_null()) {
                    t.metadata_url = j.at("metadata_url").get<std::string>();
                }
                t.width = j.value("width", 0u);
                t.height = j.value("height", 0u);
                t.pixel_sha256 = j.value("pixel_sha256", std::string());
                if (!meta::is_valid_token_id(t.token_id)) {
                    raise(ErrorCode::SchemaViolation, "bad token id " + t.token_id, at);
                }
                set.tokens[t.contract].push_back(std::move(t));
            } else {
                raise(ErrorCode::SchemaViolation, "unknown manifest record type " + type, at);
            }
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::CorruptFile, std::string("bad manifest line: ") + e.what(), at);
        }
    }
    std::sort(set.contracts.begin(), set.contracts.end(),
              [](const auto& a, const auto& b) { return a.address < b.address; });
    for (auto& [addr, list] : set.tokens) {
        const bool known = std::any_of(set.contracts.begin(), set.contracts.end(),
                                       [&](const auto& c) { return c.address == addr; });
        if (!known) {
            raise(ErrorCode::SchemaViolation, "token references undeclared contract " + addr);
        }
        std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
            return meta::compare_token_ids(a.token_id, b.token_id) < 0;
        });
    }
    return set;
}

void FixtureSet::save() const {
    std::string out;
    for (const auto& c : contracts) {
        out += nlohmann::json{{"type", "contract"}, {"address", c.address}, {"name", c.name}}.dump();
        out += '\n';
    }
    for (const auto& c : contracts) {
        const auto it = tokens.find(c.address);
        if (it == tokens.end()) {
            continue;
        }
        for (const auto& t : it->second) {
            nlohmann::json j{{"type", "token"},
                             {"contract", t.contract},
                             {"token_id", t.token_id},
                             {"media", t.media},
                             {"metadata_url", t.metadata_url ? nlohmann::json(*t.metadata_url) : nlohmann::json()},
                             {"width", t.width},
                             {"height", t.height},
                             {"pixel_sha256", t.pixel_sha256}};
            out += j.dump();
            out += '\n';
        }
    }
    fs::create_directories(root);
    write_file_atomic(root / kManifest, out);
}

std::size_t FixtureSet::token_count() const {
    std::size_t n = 0;
    for (const auto& [_, list] : tokens) {
        n += list.size();
    }
    return n;
}

fs::path FixtureSet::media_path(const FixtureToken& token) const { return root / token.media; }

std::string FixtureSet::media_url(const FixtureToken& token) const {
    if (is_absolute_url(token.media)) {
        return token.media;
    }
    return "file://" + media_path(token).lexically_normal().string();
}

}  // namespace unvd::chain
