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

#include <fcntl.h>
#include <unistd.h>

#include <cstring>
#include <mutex>
#include <shared_mutex>
#include <vector>

#include "receipt.hpp"
#include "unvd/common/binary_io.hpp"
#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/common/ids.hpp"
#include "unvd/tasks/broker.hpp"

namespace fs = std::filesystem;

namespace unvd::tasks {

namespace {

constexpr std::string_view kMagic = "UNVQ";
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 6;
// u8 state, i64 at, u64 lease, u32 receive count
constexpr std::size_t kHeadSize = 1 + 8 + 8 + 4;

enum class State : std::uint8_t { ready = 0, leased = 1, acked = 2 };

struct Frame {
    std::uint64_t offset = 0;  // of the length prefix
    State state = State::ready;
    std::int64_t at = 0;
    std::uint64_t lease = 0;
    std::uint32_t receive_count = 0;
    std::int64_t enqueued_at = 0;
    std::string id;
    std::string body;

    bool live() const { return state != State::acked; }
    bool available(std::int64_t now) const { return live() && at <= now; }
};

std::string encode_head(const Frame& f) {
    std::string out;
    BinaryWriter w(out);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(f.state));
    w.put<std::int64_t>(f.at);
    w.put<std::uint64_t>(f.lease);
    w.put<std::uint32_t>(f.receive_count);
    return out;
}

std::string encode_frame(const Frame& f) {
    std::string payload = encode_head(f);
    BinaryWriter w(payload);
    w.put<std::int64_t>(f.enqueued_at);
    w.put_str16(f.id);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(f.body.size()));
    w.put_bytes(f.body);
    std::string out;
    BinaryWriter framed(out);
    framed.put<std::uint32_t>(static_cast<std::uint32_t>(payload.size()));
    framed.put_bytes(payload);
    return out;
}

std::string encode_header() {
    std::string out;
    BinaryWriter w(out);
    w.put_bytes(kMagic);
    w.put<std::uint16_t>(kVersion);
    return out;
}

class Fd {
public:
    Fd(const fs::path& path, int flags) : fd_(::open(path.c_str(), flags | O_CLOEXEC, 0644)) {
        if (fd_ < 0) {
            raise(ErrorCode::IoError, "cannot open " + path.string() + ": " + std::strerror(errno));
        }
    }
    ~Fd() { ::close(fd_); }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;

    void pwrite_all(std::string_view data, std::uint64_t offset) const {
        while (!data.empty()) {
            const auto n = ::pwrite(fd_, data.data(), data.size(), static_cast<off_t>(offset));
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                raise(ErrorCode::IoError, std::string("queue write failed: ") + std::strerror(errno));
            }
            data.remove_prefix(static_cast<std::size_t>(n));
            offset += static_cast<std::uint64_t>(n);
        }
    }

private:
    int fd_;
};

}  // namespace

struct FileBroker::Impl {
    fs::path path;
    std::shared_ptr<Clock> clock;
    std::mutex io_mutex;
    std::unique_ptr<LockFile> lock;

    struct Loaded {
        std::vector<Frame> frames;
        std::uint64_t valid_size = 0;
    };

    void ensure_file() {
        if (!fs::exists(path)) {
            write_file_atomic(path, encode_header());
        }
    }

    Loaded load() const {
        const auto bytes = read_file(path);
        BinaryReader r(bytes);
        if (r.remaining() < kHeaderSize || r.get_bytes(4) != kMagic) {
            raise(ErrorCode::CorruptFile, "bad queue file magic at byte offset 0", 0);
        }
        if (r.get<std::uint16_t>() != kVersion) {
            raise(ErrorCode::CorruptFile, "unsupported queue file version at byte offset 4", 4);
        }
        Loaded out;
        out.valid_size = r.offset();
        while (!r.at_end()) {
            const auto start = r.offset();
            if (r.remaining() < 4) {
                break;  // torn append; dropped on the next exclusive operation
            }
            const auto len = r.get<std::uint32_t>();
            if (r.remaining() < len) {
                break;
            }
            BinaryReader fr(r.get_bytes(len), start + 4);
            Frame f;
            f.offset = start;
            const auto state = fr.get<std::uint8_t>();
            if (state > 2) {
                raise(ErrorCode::CorruptFile, "bad frame state at byte offset " + std::to_string(start + 4),
                      static_cast<std::int64_t>(start + 4));
            }
            f.state = static_cast<State>(state);
            f.at = fr.get<std::int64_t>();
            f.lease = fr.get<std::uint64_t>();
            f.receive_count = fr.get<std::uint32_t>();
            f.enqueued_at = fr.get<std::int64_t>();
            f.id = fr.get_str16();
            const auto body_len = fr.get<std::uint32_t>();
            f.body = std::string(fr.get_bytes(body_len));
            out.frames.push_back(std::move(f));
            out.valid_size = r.offset();
        }
        return out;
    }

    /// Loads under the exclusive lock, trimming a torn trailing append.
    Loaded load_exclusive() {
        ensure_file();
        auto loaded = load();
        if (fs::file_size(path) > loaded.valid_size) {
            fs::resize_file(path, loaded.valid_size);
        }
        return loaded;
    }

    void write_head(const Frame& f) const {
        Fd fd(path, O_WRONLY);
        fd.pwrite_all(encode_head(f), f.offset + 4);
    }

    Frame& current_lease(Loaded& loaded, const LeaseReceipt& receipt, std::int64_t now) {
        const auto lease = detail::lease_of(receipt.message_id, receipt.token);
        for (auto& f : loaded.frames) {
            if (f.id != receipt.message_id) {
                continue;
            }
            if (f.state != State::leased || f.lease != lease || f.at <= now) {
                break;
            }
            return f;
        }
        raise(ErrorCode::ExpiredReceipt, "lease on " + receipt.message_id + " has expired");
    }

    void maybe_compact(const Loaded& loaded) {
        std::size_t acked = 0;
        for (const auto& f : loaded.frames) {
            acked += f.live() ? 0 : 1;
        }
        if (acked >= 256 && acked * 2 >= loaded.frames.size()) {
            rewrite(loaded);
        }
    }

    void rewrite(const Loaded& loaded) {
        std::string out = encode_header();
        for (const auto& f : loaded.frames) {
            if (f.live()) {
                out += encode_frame(f);
            }
        }
        write_file_atomic(path, out);
    }
};

FileBroker::FileBroker(fs::path path, std::shared_ptr<Clock> clock) : impl_(std::make_unique<Impl>()) {
    impl_->path = std::move(path);
    impl_->clock = std::move(clock);
    if (impl_->path.has_parent_path()) {
        fs::create_directories(impl_->path.parent_path());
    }
    impl_->lock = std::make_unique<LockFile>(impl_->path.string() + ".lock");
    std::lock_guard io(impl_->io_mutex);
    std::unique_lock flock(*impl_->lock);
    impl_->load_exclusive();
}

FileBroker::~FileBroker() = default;

std::string FileBroker::send(std::string_view body, Millis delay) {
    auto& impl = *impl_;
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    impl.load_exclusive();
    Frame f;
    f.id = random_hex_id(8);
    f.body = std::string(body);
    f.enqueued_at = impl.clock->now_ms();
    f.at = f.enqueued_at + delay.count();
    AppendFile out(impl.path);
    out.append(encode_frame(f));
    return f.id;
}

std::optional<Delivery> FileBroker::receive(Millis visibility_timeout) {
    if (visibility_timeout.count() <= 0) {
        raise(ErrorCode::InvalidArgument, "visibility timeout must be positive");
    }
    auto& impl = *impl_;
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    auto loaded = impl.load_exclusive();
    const auto now = impl.clock->now_ms();
    for (auto& f : loaded.frames) {
        if (!f.available(now)) {
            continue;
        }
        f.state = State::leased;
        f.at = now + visibility_timeout.count();
        f.lease = detail::random_lease();
        ++f.receive_count;
        impl.write_head(f);
        return Delivery{QueueMessage{f.id, f.body, f.enqueued_at, f.receive_count},
                        LeaseReceipt{f.id, f.at, detail::make_token(f.id, f.lease)}};
    }
    return std::nullopt;
}

void FileBroker::ack(const LeaseReceipt& receipt) {
    auto& impl = *impl_;
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    auto loaded = impl.load_exclusive();
    auto& f = impl.current_lease(loaded, receipt, impl.clock->now_ms());
    f.state = State::acked;
    f.lease = 0;
    impl.write_head(f);
    impl.maybe_compact(loaded);
}

void FileBroker::nack(const LeaseReceipt& receipt, Millis delay) {
    auto& impl = *impl_;
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    auto loaded = impl.load_exclusive();
    const auto now = impl.clock->now_ms();
    auto& f = impl.current_lease(loaded, receipt, now);
    f.state = State::ready;
    f.lease = 0;
    f.at = now + delay.count();
    impl.write_head(f);
}

std::size_t FileBroker::depth() const {
    auto& impl = *impl_;
    std::lock_guard io(impl.io_mutex);
    std::shared_lock flock(*impl.lock);
    if (!fs::exists(impl.path)) {
        return 0;
    }
    const auto loaded = impl.load();
    return static_cast<std::size_t>(
        std::count_if(loaded.frames.begin(), loaded.frames.end(), [](const Frame& f) { return f.live(); }));
}

std::size_t FileBroker::visible() const {
    auto& impl = *impl_;
    std::lock_guard io(impl.io_mutex);
    std::shared_lock flock(*impl.lock);
    if (!fs::exists(impl.path)) {
        return 0;
    }
    const auto loaded = impl.load();
    const auto now = impl.clock->now_ms();
    return static_cast<std::size_t>(std::count_if(loaded.frames.begin(), loaded.frames.end(),
                                                  [now](const Frame& f) { return f.available(now); }));
}

void FileBroker::compact() {
    auto& impl = *impl_;
    std::lock_guard io(impl.io_mutex);
    std::unique_lock flock(*impl.lock);
    impl.rewrite(impl.load_exclusive());
}

}  // namespace unvd::tasks
