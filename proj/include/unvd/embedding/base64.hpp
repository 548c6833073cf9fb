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

#include <string>
#include <string_view>

namespace unvd::embedding {

/// Standard alphabet with padding.
std::string base64_encode(std::string_view bytes);

/// Strict standard base64: length a multiple of 4, padding required, no
/// whitespace or URL-safe characters. Throws Base64Error.
std::string base64_decode(std::string_view text);

/// Drops a leading "data:<mime>;base64," prefix if present.
std::string_view strip_data_url(std::string_view text);

}  // namespace unvd::embedding
