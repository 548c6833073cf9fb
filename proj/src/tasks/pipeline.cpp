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

#include "unvd/tasks/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "unvd/common/error.hpp"
#include "unvd/common/ids.hpp"

namespace unvd::tasks {

using meta::TaskKind;
using meta::TaskStatus;

namespace {

std::string error_name(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        return std::string(to_string(err->code()));
    }
    return "InternalError";
}

bool is_code(const Error& e, ErrorCode c) { return e.code() == c; }

}  // namespace

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::succeeded: return "succeeded";
    case Outcome::failed: return "failed";
    case Outcome::retrying: return "retrying";
    case Outcome::skipped: return "skipped";
    case Outcome::deferred: return "deferred";
    case Outcome::abandoned: return "abandoned";
    }
    return "skipped";
}

bool is_retryable(const std::exception& e) {
    if (chain::is_transient(e)) {
        return true;
    }
    const auto* err = dynamic_cast<const Error*>(&e);
    return err != nullptr && (err->code() == ErrorCode::InjectedFault || err->code() == ErrorCode::IoError);
}

Pipeline::Pipeline(meta::MetadataStore& meta, vectors::VectorStore& vectors, Broker& broker,
                   std::shared_ptr<chain::ChainProvider> provider,
                   std::shared_ptr<const embedding::Embedder> embedder, PipelineOptions options)
    : meta_(meta),
      vectors_(vectors),
      broker_(broker),
      provider_(std::move(provider)),
      embedder_(std::move(embedder)),
      options_(std::move(options)) {
    if (!embedder_) {
        raise(ErrorCode::InvalidConfig, "pipeline needs an embedder");
    }
    if (const auto dim = vectors_.dimension(); dim && *dim != embedder_->dimension()) {
        raise(ErrorCode::InvalidConfig, "vector store dimension " + std::to_string(*dim) +
                                            " differs from embedder dimension " +
                                            std::to_string(embedder_->dimension()));
    }
    if (options_.max_attempts < 1 || options_.visibility_timeout.count() <= 0 || options_.backoff.empty()) {
        raise(ErrorCode::InvalidConfig, "pipeline needs max_attempts >= 1, a positive visibility timeout "
                                        "and at least one backoff step");
    }
}

void Pipeline::hook(std::string_view stage, const meta::TaskRecord& task) const {
    if (options_.fault_hook) {
        options_.fault_hook(stage, task);
    }
}

Millis Pipeline::backoff_for(std::uint32_t attempts) const {
    const auto k = std::min<std::size_t>(attempts == 0 ? 0 : attempts - 1, options_.backoff.size() - 1);
    return options_.backoff[k];
}

std::string Pipeline::enqueue_contract(std::string_view chain, std::string_view address) {
    meta::TaskRecord task;
    task.task_id = "ct-" + random_hex_id(8);
    task.kind = TaskKind::contract;
    task.chain = std::string(chain);
    task.address = std::string(address);
    auto outcome = meta_.create_task(task);
    if (!outcome.created) {
        raise(ErrorCode::DuplicatePending, "contract " + std::string(address) + " already has task " +
                                               outcome.task.task_id + " in state " +
                                               std::string(meta::to_string(outcome.task.status)));
    }
    broker_.send(task.task_id);
    return task.task_id;
}

std::size_t Pipeline::discover_contracts(std::size_t max_pages) {
    if (!provider_) {
        raise(ErrorCode::InvalidConfig, "pipeline has no chain provider");
    }
    std::size_t enqueued = 0;
    std::string cursor;
    for (std::size_t page_no = 0; page_no < max_pages; ++page_no) {
        const auto page = provider_->list_contracts(cursor);
        for (const auto& c : page.contracts) {
            if (!meta_.get_contract(c.chain, c.address)) {
                meta_.put_contract(c);
            }
            try {
                enqueue_contract(c.chain, c.address);
                ++enqueued;
            } catch (const Error& e) {
                if (!is_code(e, ErrorCode::DuplicatePending)) {
                    throw;
                }
            }
        }
        if (!page.next_cursor) {
            break;
        }
        cursor = *page.next_cursor;
    }
    return enqueued;
}

meta::TaskRecord Pipeline::retry_task(std::string_view task_id) {
    auto task = meta_.get_task(task_id);
    if (!task) {
        raise(ErrorCode::UnknownTask, "no task '" + std::string(task_id) + "'");
    }
    if (task->status == TaskStatus::failed) {
        *task = meta_.transition_task(task_id, TaskStatus::pending);
    } else if (task->status != TaskStatus::pending) {
        raise(ErrorCode::IllegalTransition, "task " + std::string(task_id) + " is " +
                                                std::string(meta::to_string(task->status)) +
                                                "; only failed or pending tasks can be retried");
    }
    broker_.send(task->task_id);
    return *task;
}

std::size_t Pipeline::run_contract_task(const meta::TaskRecord& task) {
    if (!provider_) {
        raise(ErrorCode::InvalidConfig, "pipeline has no chain provider");
    }
    hook("contract:list", task);
    const auto entries = provider_->list_nfts(task.address);
    if (!meta_.get_contract(task.chain, task.address)) {
        meta::ContractRecord c;
        c.chain = task.chain;
        c.address = task.address;
        meta_.put_contract(c);
    }
    std::size_t spawned = 0;
    for (const auto& entry : entries) {
        meta::NftRecord rec;
        rec.chain = task.chain;
        rec.contract_address = task.address;
        rec.token_id = entry.token_id;
        rec.media_url = entry.media_url;
        rec.metadata_url = entry.metadata_url;
        rec.vector_id = meta::make_vector_id(rec.chain, rec.contract_address, rec.token_id);
        try {
            meta::validate(rec);
        } catch (const Error& e) {
            spdlog::warn("contract task {}: skipping token {}: {}", task.task_id, entry.token_id, e.what());
            continue;
        }
        const auto prev = meta_.get_nft(rec.key());
        if (!prev || prev->media_url != rec.media_url || prev->metadata_url != rec.metadata_url) {
            meta_.put_nft(rec);
        }
        meta::TaskRecord child;
        child.task_id = "nt-" + random_hex_id(8);
        child.kind = TaskKind::nft;
        child.chain = task.chain;
        child.address = task.address;
        child.token_id = entry.token_id;
        child.parent_id = task.task_id;
        const auto outcome = meta_.create_task(child);
        // A pending task found here may have lost its message to a crash
        // between create and send; a duplicate message is harmless.
        if (outcome.created || outcome.task.status == TaskStatus::pending) {
            broker_.send(outcome.task.task_id);
        }
        ++spawned;
    }
    hook("contract:spawned", task);
    return spawned;
}

std::string Pipeline::run_nft_task(const meta::TaskRecord& task) {
    if (!task.token_id) {
        raise(ErrorCode::SchemaViolation, "nft task " + task.task_id + " has no token id");
    }
    const meta::NftKey key{task.chain, task.address, *task.token_id};
    auto nft = meta_.get_nft(key);
    if (!nft) {
        raise(ErrorCode::SchemaViolation, "nft task " + task.task_id + " has no NftRecord");
    }
    hook("nft:fetch", task);
    const auto blob = chain::fetch_media(nft->media_url, options_.fetch);
    hook("nft:decode", task);
    const auto grid = embedding::decode_media(blob, options_.decode);
    hook("nft:embed", task);
    auto vec = embedder_->embed(grid);
    hook("nft:vector", task);
    vectors::VectorRecord record;
    record.id = nft->vector_id;
    record.vector = std::move(vec);
    record.metadata = {{"chain", nft->chain},
                       {"contract", nft->contract_address},
                       {"token_id", nft->token_id},
                       {"media_url", nft->media_url}};
    vectors_.upsert(options_.vector_namespace, std::move(record));
    hook("nft:metadata", task);
    nft->status = meta::NftStatus::embedded;
    nft->last_error.reset();
    meta_.put_nft(*nft);
    return nft->vector_id;
}

void Pipeline::settle_nft_failure(const meta::TaskRecord& task, const std::string& error) {
    if (!task.token_id) {
        return;
    }
    const meta::NftKey key{task.chain, task.address, *task.token_id};
    auto nft = meta_.get_nft(key);
    const auto vector_id = meta::make_vector_id(task.chain, task.address, *task.token_id);
    try {
        vectors_.remove(options_.vector_namespace, vector_id);
    } catch (const Error& e) {
        if (!is_code(e, ErrorCode::UnknownNamespace)) {
            throw;
        }
    }
    if (nft) {
        nft->status = meta::NftStatus::failed;
        nft->last_error = error;
        meta_.put_nft(*nft);
    }
}

HandleResult Pipeline::handle(const Delivery& delivery) {
    HandleResult result;
    result.task_id = delivery.message.body;
    const auto& receipt = delivery.receipt;

    auto ack = [&] {
        try {
            broker_.ack(receipt);
        } catch (const Error& e) {
            if (!is_code(e, ErrorCode::ExpiredReceipt)) {
                throw;
            }
            spdlog::warn("task {}: ack after lease expiry, message will be redelivered", result.task_id);
        }
    };
    auto nack = [&](Millis delay) {
        try {
            broker_.nack(receipt, delay);
        } catch (const Error& e) {
            if (!is_code(e, ErrorCode::ExpiredReceipt)) {
                throw;
            }
        }
    };
    auto finish = [&](Outcome o) {
        result.outcome = o;
        return result;
    };
    auto defer_for = [&](const meta::TaskRecord& t) {
        const auto age = meta_.clock().now_ms() - t.updated_at;
        return Millis(std::max<std::int64_t>(1, options_.visibility_timeout.count() - age));
    };

    auto task = meta_.get_task(result.task_id);
    if (!task) {
        spdlog::warn("dropping message {} for unknown task {}", delivery.message.message_id, result.task_id);
        ack();
        result.error = "UnknownTask";
        return finish(Outcome::skipped);
    }
    result.kind = task->kind;

    if (meta::is_terminal(task->status)) {
        ack();
        return finish(Outcome::skipped);
    }
    try {
        if (task->status == TaskStatus::processing) {
            if (meta_.clock().now_ms() - task->updated_at < options_.visibility_timeout.count()) {
                nack(defer_for(*task));
                return finish(Outcome::deferred);
            }
            // The previous holder's lease ran out without a verdict.
            meta_.transition_task(task->task_id, TaskStatus::failed, std::string("LeaseExpired"));
            meta_.transition_task(task->task_id, TaskStatus::pending);
        }
        *task = meta_.transition_task(task->task_id, TaskStatus::processing);
    } catch (const Error& e) {
        if (!is_code(e, ErrorCode::IllegalTransition)) {
            throw;
        }
        // Another worker moved the task between our read and write.
        const auto now_task = meta_.get_task(result.task_id);
        if (!now_task || meta::is_terminal(now_task->status)) {
            ack();
            return finish(Outcome::skipped);
        }
        nack(defer_for(*now_task));
        return finish(Outcome::deferred);
    }

    std::optional<std::string> failure;
    bool retryable = false;
    try {
        if (task->kind == TaskKind::contract) {
            run_contract_task(*task);
        } else {
            run_nft_task(*task);
        }
    } catch (const AbandonLease&) {
        return finish(Outcome::abandoned);
    } catch (const std::exception& e) {
        failure = error_name(e);
        retryable = is_retryable(e);
        spdlog::debug("task {} attempt {} failed: {}", task->task_id, task->attempts, e.what());
    }

    try {
        if (!failure) {
            meta_.transition_task(task->task_id, TaskStatus::done);
            ack();
            return finish(Outcome::succeeded);
        }
        result.error = failure;
        meta_.transition_task(task->task_id, TaskStatus::failed, failure);
        if (retryable && task->attempts < options_.max_attempts) {
            meta_.transition_task(task->task_id, TaskStatus::pending);
            nack(backoff_for(task->attempts));
            return finish(Outcome::retrying);
        }
        if (task->kind == TaskKind::nft) {
            settle_nft_failure(*task, *failure);
        }
        ack();
        return finish(Outcome::failed);
    } catch (const Error& e) {
        if (!is_code(e, ErrorCode::IllegalTransition)) {
            throw;
        }
        // A redelivery took the task over while this attempt ran; its holder
        // now owns the verdict.
        ack();
        return finish(Outcome::skipped);
    }
}

std::optional<HandleResult> Pipeline::process_one() {
    auto delivery = broker_.receive(options_.visibility_timeout);
    if (!delivery) {
        return std::nullopt;
    }
    return handle(*delivery);
}

}  // namespace unvd::tasks
