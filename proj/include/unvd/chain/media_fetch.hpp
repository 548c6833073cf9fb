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

#include <string_view>

#include "unvd/chain/provider.hpp"
#include "unvd/embedding/image_codec.hpp"

namespace unvd::chain {

struct FetchOptions {
    std::size_t cap = embedding::kDefaultMediaCap;
    Millis timeout{10000};
};

/// Reads file:// or http(s):// media verbatim. Throws TooLarge, FetchTimeout,
/// HttpError (detail is the status), ProviderUnavailable, IoError or
/// InvalidArgument for other schemes.
embedding::MediaBlob fetch_media(std::string_view url, const FetchOptions& opts = {});

}  // namespace unvd::chain
