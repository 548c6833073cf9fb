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
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "unvd/tasks/broker.hpp"
#include "unvd/tasks/pipeline.hpp"

namespace unvd::tasks {

struct WorkerOptions {
    std::size_t concurrency = 4;
    Millis visibility_timeout{30000};
    /// Pause between empty receives.
    Millis idle_sleep{20};
};

/// Attempt-level counters. A retried attempt counts as failed, so
/// processed == succeeded + failed always holds.
struct WorkerStats {
    std::uint64_t processed = 0;
    std::uint64_t succeeded = 0;
    std::uint64_t failed = 0;
    std::uint64_t retried = 0;
    std::uint64_t skipped = 0;
    std::uint64_t deferred = 0;
    std::uint64_t abandoned = 0;
    std::uint64_t contract_succeeded = 0;
    std::uint64_t nft_succeeded = 0;
    double busy_seconds = 0.0;
    /// Wall time the pool has been running, summed over start/stop cycles.
    double elapsed_seconds = 0.0;
    /// Succeeded tasks per second of elapsed time, by kind.
    double contract_per_second = 0.0;
    double nft_per_second = 0.0;
};

using Handler = std::function<HandleResult(const Delivery&)>;

/// N threads pulling from one broker. Each holds at most one lease at a time.
class WorkerPool {
public:
    WorkerPool(Broker& broker, Handler handler, WorkerOptions options = {});
    /// Convenience: handle deliveries with `pipeline`, using its visibility timeout.
    WorkerPool(Pipeline& pipeline, std::size_t concurrency);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    void start();
    /// Lets every in-flight task finish, then joins the threads.
    void stop();
    bool running() const { return running_; }

    /// Blocks until the broker is empty and no worker holds a task. False on
    /// timeout.
    bool wait_idle(Millis timeout);

    WorkerStats stats() const;
    const WorkerOptions& options() const { return options_; }

private:
    void run();
    void record(const HandleResult& r, double seconds);

    Broker& broker_;
    Handler handler_;
    WorkerOptions options_;
    std::vector<std::thread> threads_;
    std::atomic<bool> running_{false};
    std::atomic<bool> stopping_{false};
    std::atomic<std::size_t> in_flight_{0};
    mutable std::mutex mutex_;
    std::condition_variable wake_;
    WorkerStats stats_;
    std::chrono::steady_clock::time_point started_at_;
    double elapsed_before_ = 0.0;
};

}  // namespace unvd::tasks
