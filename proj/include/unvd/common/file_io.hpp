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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace unvd {

/// Advisory cross-process lock (flock) on a dedicated file. Satisfies
/// SharedLockable so std::unique_lock / std::shared_lock work with it. One
/// instance must not be shared between threads without an outer mutex: flock
/// state belongs to the open file description, not the thread.
class LockFile {
public:
    explicit LockFile(const std::filesystem::path& path);
    ~LockFile();
    LockFile(const LockFile&) = delete;
    LockFile& operator=(const LockFile&) = delete;

    void lock();
    bool try_lock();
    void unlock();
    void lock_shared();
    bool try_lock_shared();
    void unlock_shared() { unlock(); }

private:
    int fd_ = -1;
};

/// Identity of a file's current contents, used to notice that another process
/// appended to or replaced a file.
struct FileIdentity {
    std::uint64_t device = 0;
    std::uint64_t inode = 0;
    std::uint64_t size = 0;
    std::int64_t mtime_ns = 0;

    bool same_file(const FileIdentity& o) const {
        return device == o.device && inode == o.inode;
    }
    bool operator==(const FileIdentity&) const = default;
};

std::optional<FileIdentity> file_identity(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
std::string read_file_range(const std::filesystem::path& path, std::uint64_t offset,
                            std::uint64_t length);

/// Write to a sibling temp file then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view data,
                       bool durable = false);

/// O_APPEND writer; each append is issued as a single write call.
class AppendFile {
public:
    explicit AppendFile(const std::filesystem::path& path);
    ~AppendFile();
    AppendFile(const AppendFile&) = delete;
    AppendFile& operator=(const AppendFile&) = delete;

    void append(std::string_view data);
    void sync();
    void truncate(std::uint64_t size);
    std::uint64_t size() const;

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

}  // namespace unvd
