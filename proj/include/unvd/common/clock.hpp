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

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace unvd {

/// Wall-clock source in milliseconds since the Unix epoch. Leases, token
/// expiry and record timestamps all read time through this interface.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() const = 0;
};

class SystemClock final : public Clock {
public:
    std::int64_t now_ms() const override;
};

/// Test clock that only moves when told to.
class ManualClock final : public Clock {
public:
    explicit ManualClock(std::int64_t start_ms = 1'700'000'000'000) : now_(start_ms) {}

    std::int64_t now_ms() const override { return now_.load(); }
    void advance(std::int64_t ms) { now_.fetch_add(ms); }
    void set(std::int64_t ms) { now_.store(ms); }

private:
    std::atomic<std::int64_t> now_;
};

std::shared_ptr<Clock> system_clock();

/// "2026-10-15T12:34:56.789Z"
std::string format_utc(std::int64_t epoch_ms);
std::optional<std::int64_t> parse_utc(std::string_view text);

}  // namespace unvd
