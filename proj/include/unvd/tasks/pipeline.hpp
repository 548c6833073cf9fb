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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unvd/chain/media_fetch.hpp"
#include "unvd/chain/provider.hpp"
#include "unvd/embedding/embedder.hpp"
#include "unvd/meta/metadata_store.hpp"
#include "unvd/tasks/broker.hpp"
#include "unvd/vectors/vector_store.hpp"

namespace unvd::tasks {

/// Thrown from a fault hook to make the worker walk away from its lease
/// without settling it, as if the process had died mid-task.
struct AbandonLease {};

inline constexpr std::string_view kDefaultVectorNamespace = "main";

struct PipelineOptions {
    /// Vector namespace for every chain; vector ids carry the chain prefix.
    std::string vector_namespace{kDefaultVectorNamespace};
    Millis visibility_timeout{30000};
    std::uint32_t max_attempts = 3;
    /// Delay before retry k is backoff[k-1]; the last entry repeats.
    std::vector<Millis> backoff{Millis(1000), Millis(4000), Millis(16000)};
    chain::FetchOptions fetch;
    embedding::DecodeLimits decode;
    /// Invoked at named stages ("contract:list", "contract:spawned",
    /// "nft:fetch", "nft:decode", "nft:embed", "nft:vector", "nft:metadata").
    /// Throwing an Error fails the attempt there; throwing AbandonLease
    /// drops the lease unsettled.
    std::function<void(std::string_view stage, const meta::TaskRecord& task)> fault_hook;
};

enum class Outcome {
    succeeded,  // task done, message acked
    failed,     // task failed for good, message acked
    retrying,   // attempt failed, task back to pending, message nacked with backoff
    skipped,    // message for a task that is already settled or unknown, acked
    deferred,   // another worker holds the task, message nacked
    abandoned,  // lease dropped by a fault hook
};

std::string_view to_string(Outcome o);

struct HandleResult {
    std::string task_id;
    std::optional<meta::TaskKind> kind;
    Outcome outcome = Outcome::skipped;
    std::optional<std::string> error;
};

/// The contract and NFT task handlers plus the bookkeeping that turns broker
/// deliveries into task lifecycle transitions.
///
/// An NFT task writes its vector before marking the NftRecord embedded, so an
/// embedded record always has a vector. When the task fails for good the
/// vector is removed and the record marked failed.
class Pipeline {
public:
    Pipeline(meta::MetadataStore& meta, vectors::VectorStore& vectors, Broker& broker,
             std::shared_ptr<chain::ChainProvider> provider, std::shared_ptr<const embedding::Embedder> embedder,
             PipelineOptions options = {});

    /// Creates a pending contract task and queues it. Throws SchemaViolation,
    /// or DuplicatePending while an earlier task for the address is unsettled.
    std::string enqueue_contract(std::string_view chain, std::string_view address);

    /// Walks the provider's contract listing and enqueues every contract that
    /// has no unsettled task. Returns the number enqueued.
    std::size_t discover_contracts(std::size_t max_pages = SIZE_MAX);

    /// failed -> pending and re-queued; a pending task is simply re-queued.
    /// Throws UnknownTask or IllegalTransition.
    meta::TaskRecord retry_task(std::string_view task_id);

    /// Upserts the contract, records each token as discovered and queues one
    /// NFT task per token. Spawning is keyed by NFT, so a rerun adds nothing
    /// new. Returns the number of tokens listed.
    std::size_t run_contract_task(const meta::TaskRecord& task);

    /// fetch -> decode -> embed -> vector upsert -> NftRecord embedded.
    std::string run_nft_task(const meta::TaskRecord& task);

    /// Runs the task named by a delivery and settles the message.
    HandleResult handle(const Delivery& delivery);

    /// Receives and handles one message; nullopt when none is visible.
    std::optional<HandleResult> process_one();

    const PipelineOptions& options() const { return options_; }
    Broker& broker() { return broker_; }
    meta::MetadataStore& metadata() { return meta_; }
    vectors::VectorStore& vectors() { return vectors_; }

private:
    void hook(std::string_view stage, const meta::TaskRecord& task) const;
    void settle_nft_failure(const meta::TaskRecord& task, const std::string& error);
    Millis backoff_for(std::uint32_t attempts) const;

    meta::MetadataStore& meta_;
    vectors::VectorStore& vectors_;
    Broker& broker_;
    std::shared_ptr<chain::ChainProvider> provider_;
    std::shared_ptr<const embedding::Embedder> embedder_;
    PipelineOptions options_;
};

/// Errors that a later attempt may not repeat: timeouts, unavailable
/// providers, HTTP 429/5xx, I/O trouble and injected faults.
bool is_retryable(const std::exception& e);

}  // namespace unvd::tasks
