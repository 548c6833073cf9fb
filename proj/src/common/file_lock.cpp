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
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/common/ids.hpp"

namespace unvd {

namespace {

[[noreturn]] void io_fail(const std::string& what, const std::filesystem::path& path) {
    raise(ErrorCode::IoError, what + " " + path.string() + ": " + std::strerror(errno));
}

int flock_retry(int fd, int op) {
    int rc;
    do {
        rc = ::flock(fd, op);
    } while (rc != 0 && errno == EINTR);
    return rc;
}

}  // namespace

LockFile::LockFile(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        io_fail("cannot open lock file", path);
    }
}

LockFile::~LockFile() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void LockFile::lock() {
    if (flock_retry(fd_, LOCK_EX) != 0) {
        raise(ErrorCode::IoError, std::string("flock: ") + std::strerror(errno));
    }
}

bool LockFile::try_lock() { return flock_retry(fd_, LOCK_EX | LOCK_NB) == 0; }

void LockFile::unlock() { flock_retry(fd_, LOCK_UN); }

void LockFile::lock_shared() {
    if (flock_retry(fd_, LOCK_SH) != 0) {
        raise(ErrorCode::IoError, std::string("flock: ") + std::strerror(errno));
    }
}

bool LockFile::try_lock_shared() { return flock_retry(fd_, LOCK_SH | LOCK_NB) == 0; }

std::optional<FileIdentity> file_identity(const std::filesystem::path& path) {
    struct stat st {};
    if (::stat(path.c_str(), &st) != 0) {
        return std::nullopt;
    }
    FileIdentity id;
    id.device = static_cast<std::uint64_t>(st.st_dev);
    id.inode = static_cast<std::uint64_t>(st.st_ino);
    id.size = static_cast<std::uint64_t>(st.st_size);
    id.mtime_ns = static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1'000'000'000 + st.st_mtim.tv_nsec;
    return id;
}

std::string read_file(const std::filesystem::path& path) {
    const auto id = file_identity(path);
    if (!id) {
        io_fail("cannot stat", path);
    }
    return read_file_range(path, 0, id->size);
}

std::string read_file_range(const std::filesystem::path& path, std::uint64_t offset,
                            std::uint64_t length) {
    const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd < 0) {
        io_fail("cannot open", path);
    }
    std::string out(length, '\0');
    std::uint64_t done = 0;
    while (done < length) {
        const auto n = ::pread(fd, out.data() + done, length - done,
                               static_cast<off_t>(offset + done));
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            ::close(fd);
            io_fail("read failed", path);
        }
        if (n == 0) {
            break;
        }
        done += static_cast<std::uint64_t>(n);
    }
    ::close(fd);
    out.resize(done);
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view data, bool durable) {
    auto tmp = path;
    tmp += ".tmp-" + random_hex_id(4);
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) {
        io_fail("cannot create", tmp);
    }
    std::size_t done = 0;
    while (done < data.size()) {
        const auto n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            ::close(fd);
            io_fail("write failed", tmp);
        }
        done += static_cast<std::size_t>(n);
    }
    if (durable) {
        ::fsync(fd);
    }
    ::close(fd);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        raise(ErrorCode::IoError, "rename to " + path.string() + " failed");
    }
}

AppendFile::AppendFile(const std::filesystem::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        io_fail("cannot open for append", path);
    }
}

AppendFile::~AppendFile() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void AppendFile::append(std::string_view data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const auto n = ::write(fd_, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            io_fail("append failed", path_);
        }
        done += static_cast<std::size_t>(n);
    }
}

void AppendFile::sync() { ::fsync(fd_); }

void AppendFile::truncate(std::uint64_t size) {
    if (::ftruncate(fd_, static_cast<off_t>(size)) != 0) {
        io_fail("truncate failed", path_);
    }
}

std::uint64_t AppendFile::size() const {
    struct stat st {};
    if (::fstat(fd_, &st) != 0) {
        return 0;
    }
    return static_cast<std::uint64_t>(st.st_size);
}

}  // namespace unvd
