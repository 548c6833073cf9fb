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

#include <map>
#include <mutex>
#include <unordered_map>

#include "receipt.hpp"
#include "unvd/common/error.hpp"
#include "unvd/common/ids.hpp"
#include "unvd/tasks/broker.hpp"

namespace unvd::tasks {

namespace {

struct Entry {
    QueueMessage message;
    bool leased = false;
    std::int64_t at = 0;  // visible_at when ready, deadline when leased
    std::uint64_t lease = 0;

    bool available(std::int64_t now) const { return at <= now; }
};

}  // namespace

struct InMemoryBroker::Impl {
    std::shared_ptr<Clock> clock;
    mutable std::mutex mutex;
    std::uint64_t next_seq = 0;
    std::map<std::uint64_t, Entry> entries;  // enqueue order
    std::unordered_map<std::string, std::uint64_t> seq_of;

    Entry& current_lease(const LeaseReceipt& receipt, std::int64_t now) {
        const auto lease = detail::lease_of(receipt.message_id, receipt.token);
        const auto it = seq_of.find(receipt.message_id);
        if (it == seq_of.end()) {
            raise(ErrorCode::ExpiredReceipt, "message " + receipt.message_id + " is no longer queued");
        }
        auto& e = entries.at(it->second);
        if (!e.leased || e.lease != lease || e.at <= now) {
            raise(ErrorCode::ExpiredReceipt, "lease on " + receipt.message_id + " has expired");
        }
        return e;
    }
};

InMemoryBroker::InMemoryBroker(std::shared_ptr<Clock> clock) : impl_(std::make_unique<Impl>()) {
    impl_->clock = std::move(clock);
}

InMemoryBroker::~InMemoryBroker() = default;

std::string InMemoryBroker::send(std::string_view body, Millis delay) {
    std::lock_guard lock(impl_->mutex);
    const auto now = impl_->clock->now_ms();
    Entry e;
    e.message.message_id = random_hex_id(8);
    e.message.body = std::string(body);
    e.message.enqueued_at = now;
    e.at = now + delay.count();
    const auto seq = impl_->next_seq++;
    impl_->seq_of.emplace(e.message.message_id, seq);
    auto id = e.message.message_id;
    impl_->entries.emplace(seq, std::move(e));
    return id;
}

std::optional<Delivery> InMemoryBroker::receive(Millis visibility_timeout) {
    if (visibility_timeout.count() <= 0) {
        raise(ErrorCode::InvalidArgument, "visibility timeout must be positive");
    }
    std::lock_guard lock(impl_->mutex);
    const auto now = impl_->clock->now_ms();
    for (auto& [_, e] : impl_->entries) {
        if (!e.available(now)) {
            continue;
        }
        e.leased = true;
        e.at = now + visibility_timeout.count();
        e.lease = detail::random_lease();
        ++e.message.receive_count;
        return Delivery{e.message, LeaseReceipt{e.message.message_id, e.at,
                                                detail::make_token(e.message.message_id, e.lease)}};
    }
    return std::nullopt;
}

void InMemoryBroker::ack(const LeaseReceipt& receipt) {
    std::lock_guard lock(impl_->mutex);
    impl_->current_lease(receipt, impl_->clock->now_ms());
    const auto seq = impl_->seq_of.at(receipt.message_id);
    impl_->entries.erase(seq);
    impl_->seq_of.erase(receipt.message_id);
}

void InMemoryBroker::nack(const LeaseReceipt& receipt, Millis delay) {
    std::lock_guard lock(impl_->mutex);
    const auto now = impl_->clock->now_ms();
    auto& e = impl_->current_lease(receipt, now);
    e.leased = false;
    e.lease = 0;
    e.at = now + delay.count();
}

std::size_t InMemoryBroker::depth() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->entries.size();
}

std::size_t InMemoryBroker::visible() const {
    std::lock_guard lock(impl_->mutex);
    const auto now = impl_->clock->now_ms();
    std::size_t n = 0;
    for (const auto& [_, e] : impl_->entries) {
        n += e.available(now) ? 1 : 0;
    }
    return n;
}

}  // namespace unvd::tasks
