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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "unvd/common/clock.hpp"

namespace unvd::tasks {

using Millis = std::chrono::milliseconds;

struct QueueMessage {
    std::string message_id;
    std::string body;  // a task id
    std::int64_t enqueued_at = 0;
    std::uint32_t receive_count = 0;
};

struct LeaseReceipt {
    std::string message_id;
    std::int64_t lease_deadline = 0;
    /// "<message_id>#<lease token>"; a new token is minted for every lease.
    std::string token;
};

struct Delivery {
    QueueMessage message;
    LeaseReceipt receipt;
};

/// At-least-once queue with visibility timeouts.
///
/// A received message is hidden until its lease deadline. ack() deletes it;
/// nack() makes it visible again after `delay`; doing neither lets the lease
/// lapse and the message reappears. A receipt is only honoured while its lease
/// is current, so at most one consumer can settle a given delivery. Ordering
/// is not promised.
class Broker {
public:
    virtual ~Broker() = default;

    /// Returns the message id. The message becomes visible after `delay`.
    virtual std::string send(std::string_view body, Millis delay = Millis(0)) = 0;
    /// Throws InvalidArgument unless visibility_timeout > 0.
    virtual std::optional<Delivery> receive(Millis visibility_timeout) = 0;
    /// Throws ExpiredReceipt if the lease lapsed or was taken over.
    virtual void ack(const LeaseReceipt& receipt) = 0;
    virtual void nack(const LeaseReceipt& receipt, Millis delay = Millis(0)) = 0;
    /// Messages not yet acked, visible or not.
    virtual std::size_t depth() const = 0;
    /// Messages a receive() could return right now.
    virtual std::size_t visible() const = 0;
};

/// Thread-safe in-process broker.
class InMemoryBroker final : public Broker {
public:
    explicit InMemoryBroker(std::shared_ptr<Clock> clock = system_clock());
    ~InMemoryBroker() override;

    std::string send(std::string_view body, Millis delay = Millis(0)) override;
    std::optional<Delivery> receive(Millis visibility_timeout) override;
    void ack(const LeaseReceipt& receipt) override;
    void nack(const LeaseReceipt& receipt, Millis delay = Millis(0)) override;
    std::size_t depth() const override;
    std::size_t visible() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Durable broker in a single file shared by any number of processes.
///
/// The file starts with "UNVQ" and a u16 version, followed by frames:
///   u32 frame length, u8 state (0 ready, 1 leased, 2 acked),
///   i64 visible_at (ready) or lease deadline (leased), u64 lease token,
///   u32 receive count, i64 enqueue time, u16+bytes message id,
///   u32+bytes body.
/// State changes rewrite the fixed-size frame head in place under an
/// exclusive lock on "<path>.lock"; acked frames are dropped by compaction.
class FileBroker final : public Broker {
public:
    explicit FileBroker(std::filesystem::path path, std::shared_ptr<Clock> clock = system_clock());
    ~FileBroker() override;

    std::string send(std::string_view body, Millis delay = Millis(0)) override;
    std::optional<Delivery> receive(Millis visibility_timeout) override;
    void ack(const LeaseReceipt& receipt) override;
    void nack(const LeaseReceipt& receipt, Millis delay = Millis(0)) override;
    std::size_t depth() const override;
    std::size_t visible() const override;

    /// Drops acked frames. Runs automatically once they dominate the file.
    void compact();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace unvd::tasks
