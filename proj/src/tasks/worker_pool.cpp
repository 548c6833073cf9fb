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

#include "unvd/tasks/worker_pool.hpp"

#include <spdlog/spdlog.h>

#include "unvd/common/error.hpp"

namespace unvd::tasks {

WorkerPool::WorkerPool(Broker& broker, Handler handler, WorkerOptions options)
    : broker_(broker), handler_(std::move(handler)), options_(options) {
    if (options_.concurrency == 0) {
        raise(ErrorCode::InvalidConfig, "worker concurrency must be at least 1");
    }
    if (options_.visibility_timeout.count() <= 0) {
        raise(ErrorCode::InvalidConfig, "visibility timeout must be positive");
    }
}

WorkerPool::WorkerPool(Pipeline& pipeline, std::size_t concurrency)
    : WorkerPool(pipeline.broker(), [&pipeline](const Delivery& d) { return pipeline.handle(d); },
                 WorkerOptions{concurrency, pipeline.options().visibility_timeout, Millis(20)}) {}

WorkerPool::~WorkerPool() { stop(); }

void WorkerPool::start() {
    if (running_.exchange(true)) {
        return;
    }
    stopping_ = false;
    {
        std::lock_guard lock(mutex_);
        started_at_ = std::chrono::steady_clock::now();
    }
    threads_.reserve(options_.concurrency);
    for (std::size_t i = 0; i < options_.concurrency; ++i) {
        threads_.emplace_back([this] { run(); });
    }
}

void WorkerPool::stop() {
    if (!running_) {
        return;
    }
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) {
        t.join();
    }
    threads_.clear();
    std::lock_guard lock(mutex_);
    elapsed_before_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - started_at_).count();
    running_ = false;
}

void WorkerPool::run() {
    using clock = std::chrono::steady_clock;
    while (!stopping_) {
        std::optional<Delivery> delivery;
        ++in_flight_;
        try {
            delivery = broker_.receive(options_.visibility_timeout);
        } catch (const std::exception& e) {
            spdlog::error("receive failed: {}", e.what());
        }
        if (!delivery) {
            --in_flight_;
            std::unique_lock lock(mutex_);
            wake_.wait_for(lock, options_.idle_sleep, [this] { return stopping_.load(); });
            continue;
        }
        const auto t0 = clock::now();
        HandleResult result;
        try {
            result = handler_(*delivery);
        } catch (const std::exception& e) {
            // The lease is left to lapse so the message comes back.
            spdlog::error("task {} handler error: {}", delivery->message.body, e.what());
            result.task_id = delivery->message.body;
            result.outcome = Outcome::failed;
            result.error = e.what();
        }
        record(result, std::chrono::duration<double>(clock::now() - t0).count());
        --in_flight_;
    }
}

void WorkerPool::record(const HandleResult& r, double seconds) {
    std::lock_guard lock(mutex_);
    stats_.busy_seconds += seconds;
    switch (r.outcome) {
    case Outcome::succeeded:
        ++stats_.succeeded;
        ++stats_.processed;
        if (r.kind == meta::TaskKind::contract) {
            ++stats_.contract_succeeded;
        } else if (r.kind == meta::TaskKind::nft) {
            ++stats_.nft_succeeded;
        }
        break;
    case Outcome::retrying:
        ++stats_.retried;
        [[fallthrough]];
    case Outcome::failed:
        ++stats_.failed;
        ++stats_.processed;
        break;
    case Outcome::skipped: ++stats_.skipped; break;
    case Outcome::deferred: ++stats_.deferred; break;
    case Outcome::abandoned: ++stats_.abandoned; break;
    }
}

bool WorkerPool::wait_idle(Millis timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        if (in_flight_ == 0 && broker_.depth() == 0) {
            return true;
        }
        std::this_thread::sleep_for(Millis(5));
    }
    return in_flight_ == 0 && broker_.depth() == 0;
}

WorkerStats WorkerPool::stats() const {
    std::lock_guard lock(mutex_);
    WorkerStats out = stats_;
    out.elapsed_seconds = elapsed_before_;
    if (running_) {
        out.elapsed_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started_at_).count();
    }
    if (out.elapsed_seconds > 0.0) {
        out.contract_per_second = static_cast<double>(out.contract_succeeded) / out.elapsed_seconds;
        out.nft_per_second = static_cast<double>(out.nft_succeeded) / out.elapsed_seconds;
    }
    return out;
}

}  // namespace unvd::tasks
