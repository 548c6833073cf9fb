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

#include "unvd/chain/media_fetch.hpp"

#include <filesystem>

#include "http_client.hpp"
#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"

namespace fs = std::filesystem;

namespace unvd::chain {

namespace {

std::string percent_decode(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
            std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
            out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
            i += 2;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

embedding::MediaBlob fetch_file(std::string_view url, const FetchOptions& opts) {
    auto rest = url.substr(7);
    // file://localhost/path is the same as file:///path.
    if (rest.substr(0, 9) == "localhost") {
        rest.remove_prefix(9);
    }
    if (rest.empty() || rest.front() != '/') {
        raise(ErrorCode::InvalidArgument, "file URL must carry an absolute path: " + std::string(url));
    }
    const fs::path path = percent_decode(rest);
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    if (ec) {
        raise(ErrorCode::IoError, "cannot read " + path.string() + ": " + ec.message());
    }
    if (size > opts.cap) {
        raise(ErrorCode::TooLarge, path.string() + " is " + std::to_string(size) + " bytes, cap is " +
                                       std::to_string(opts.cap));
    }
    embedding::MediaBlob blob;
    blob.bytes = read_file(path);
    if (blob.bytes.size() > opts.cap) {
        raise(ErrorCode::TooLarge, path.string() + " grew beyond the cap while reading");
    }
    blob.mime = embedding::sniff_mime(blob.bytes);
    blob.source_url = std::string(url);
    return blob;
}

}  // namespace

embedding::MediaBlob fetch_media(std::string_view url, const FetchOptions& opts) {
    if (url.substr(0, 7) == "file://") {
        return fetch_file(url, opts);
    }
    if (url.substr(0, 7) != "http://" && url.substr(0, 8) != "https://") {
        raise(ErrorCode::InvalidArgument, "unsupported media URL: " + std::string(url));
    }
    http::Request req;
    req.url = std::string(url);
    req.timeout = opts.timeout;
    req.max_body = opts.cap;
    auto reply = http::send(req);
    http::expect_ok(reply, "media fetch " + req.url);
    embedding::MediaBlob blob;
    blob.bytes = std::move(reply.body);
    blob.mime = reply.content_type.empty() ? embedding::sniff_mime(blob.bytes) : reply.content_type;
    blob.source_url = req.url;
    return blob;
}

}  // namespace unvd::chain
