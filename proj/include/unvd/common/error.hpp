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
#include <stdexcept>
#include <string>
#include <string_view>

namespace unvd {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    ZeroNorm,
    InvalidId,
    UnknownNamespace,
    CorruptFile,
    IoError,
    SchemaViolation,
    UnknownContract,
    UnknownTask,
    IllegalTransition,
    DuplicatePending,
    UnsupportedFormat,
    DecodeError,
    Base64Error,
    InvalidConfig,
    ProviderUnavailable,
    BadCursor,
    FetchTimeout,
    TooLarge,
    HttpError,
    ExpiredReceipt,
    RankDeficient,
    DegenerateInput,
    PerplexityOutOfRange,
    DisconnectedGraph,
    DegenerateCluster,
    Unauthorized,
    InjectedFault,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error carrying a stable code. `detail()` holds the HTTP status for
/// HttpError and the byte offset for CorruptFile; it is 0 otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::int64_t detail = 0);

    ErrorCode code() const noexcept { return code_; }
    std::int64_t detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::int64_t detail_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message, std::int64_t detail = 0);

}  // namespace unvd
