/*
 * Copyright 2026 The pargp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <exception>

#include "pargp/runtime/transport.hpp"

namespace pargp::runtime {
namespace {

// Returns false on EOF before any byte was read.
bool read_exact(int fd, void* buf, std::size_t n) {
  auto* p = static_cast<char*>(buf);
  std::size_t done = 0;
  while (done < n) {
    const ssize_t r = ::read(fd, p + done, n - done);
    if (r == 0) {
      if (done == 0) return false;
      throw std::runtime_error("socket closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("socket read failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(r);
  }
  return true;
}

bool write_exact(int fd, const void* buf, std::size_t n) {
  const auto* p = static_cast<const char*>(buf);
  std::size_t done = 0;
  while (done < n) {
    const ssize_t r = ::send(fd, p + done, n - done, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(r);
  }
  return true;
}

bool write_frame(int fd, const Message& m) {
  const auto bytes = encode(m);
  const std::uint64_t len = bytes.size();
  return write_exact(fd, &len, sizeof len) && write_exact(fd, bytes.data(), bytes.size());
}

// Empty optional-like: returns false on clean EOF.
bool read_frame(int fd, Message& out) {
  std::uint64_t len = 0;
  if (!read_exact(fd, &len, sizeof len)) return false;
  std::vector<std::byte> bytes(len);
  if (len && !read_exact(fd, bytes.data(), len)) throw std::runtime_error("socket closed mid-frame");
  out = decode(bytes);
  return true;
}

class SocketWorkerLink final : public WorkerLink {
 public:
  SocketWorkerLink(int fd, int rank, int workers) : fd_(fd), rank_(rank), workers_(workers) {}
  int rank() const override { return rank_; }
  int workers() const override { return workers_; }
  using WorkerLink::send;
  using WorkerLink::receive;
  void send(Message m) override {
    if (!write_frame(fd_, m)) throw TransportClosed();
  }
  Message receive() override {
    Message m;
    if (!read_frame(fd_, m)) throw TransportClosed();
    return m;
  }

 private:
  int fd_;
  int rank_;
  int workers_;
};

class SocketMasterLink final : public MasterLink {
 public:
  explicit SocketMasterLink(const std::vector<int>& fds) : fds_(fds) {}
  int workers() const override { return static_cast<int>(fds_.size()); }
  void send(int w, Message m) override {
    if (!write_frame(fds_[static_cast<std::size_t>(w)], m))
      throw WorkerFailure(w, "worker process is gone");
  }
  Message receive(int w) override {
    Message m;
    if (!read_frame(fds_[static_cast<std::size_t>(w)], m))
      throw WorkerFailure(w, "worker process exited unexpectedly");
    return m;
  }

 private:
  const std::vector<int>& fds_;
};

[[noreturn]] void run_child(int fd, int rank, int workers, const WorkerTask& task) {
  int status = 0;
  SocketWorkerLink link(fd, rank, workers);
  try {
    task(link);
  } catch (const TransportClosed&) {
    status = 1;
  } catch (...) {
    write_frame(fd, failure_message(rank, std::current_exception()));
    status = 1;
  }
  ::close(fd);
  ::_exit(status);
}

class ProcessTransport final : public Transport {
 public:
  TransportKind kind() const override { return TransportKind::kProcesses; }

  void execute(int workers, const WorkerTask& worker, const MasterTask& master) override {
    std::vector<int> master_fds;
    std::vector<pid_t> children;
    auto cleanup = [&](bool kill_children) {
      for (int fd : master_fds) ::close(fd);
      master_fds.clear();
      for (pid_t pid : children) {
        if (kill_children) ::kill(pid, SIGKILL);
        int st = 0;
        while (::waitpid(pid, &st, 0) < 0 && errno == EINTR) {
        }
      }
      children.clear();
    };

    std::fflush(nullptr);
    std::vector<int> child_fds;
    for (int w = 0; w < workers; ++w) {
      int sv[2];
      if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) != 0) {
        for (int fd : child_fds) ::close(fd);
        cleanup(true);
        throw std::runtime_error(std::string("socketpair failed: ") + std::strerror(errno));
      }
      master_fds.push_back(sv[0]);
      child_fds.push_back(sv[1]);
    }
    for (int w = 0; w < workers; ++w) {
      const pid_t pid = ::fork();
      if (pid < 0) {
        for (int fd : child_fds) ::close(fd);
        cleanup(true);
        throw std::runtime_error(std::string("fork failed: ") + std::strerror(errno));
      }
      if (pid == 0) {
        for (int fd : master_fds) ::close(fd);
        for (int v = 0; v < workers; ++v)
          if (v != w) ::close(child_fds[static_cast<std::size_t>(v)]);
        run_child(child_fds[static_cast<std::size_t>(w)], w, workers, worker);
      }
      children.push_back(pid);
    }
    for (int fd : child_fds) ::close(fd);

    try {
      SocketMasterLink link(master_fds);
      master(link);
    } catch (...) {
      cleanup(true);
      throw;
    }
    cleanup(false);
  }
};

}  // namespace

std::unique_ptr<Transport> make_process_transport() { return std::make_unique<ProcessTransport>(); }

}  // namespace pargp::runtime
