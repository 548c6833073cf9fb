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

#include "unvd/common/error.hpp"

#include <fmt/format.h>

namespace unvd {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::InvalidId: return "InvalidId";
    case ErrorCode::UnknownNamespace: return "UnknownNamespace";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnknownContract: return "UnknownContract";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::DuplicatePending: return "DuplicatePending";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::Base64Error: return "Base64Error";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::BadCursor: return "BadCursor";
    case ErrorCode::FetchTimeout: return "FetchTimeout";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::ExpiredReceipt: return "ExpiredReceipt";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::PerplexityOutOfRange: return "PerplexityOutOfRange";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::DegenerateCluster: return "DegenerateCluster";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::InjectedFault: return "InjectedFault";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::int64_t detail)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)),
      code_(code),
      detail_(detail) {}

void raise(ErrorCode code, const std::string& message, std::int64_t detail) {
    throw Error(code, message, detail);
}

}  // namespace unvd
