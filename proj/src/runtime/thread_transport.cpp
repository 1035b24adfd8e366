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

#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>

#include "pargp/runtime/transport.hpp"

namespace pargp::runtime {
namespace {

// Two queues per worker (to it, from it) behind one lock.
class Fabric {
 public:
  explicit Fabric(int workers)
      : to_worker_(static_cast<std::size_t>(workers)), to_master_(static_cast<std::size_t>(workers)) {}

  void push(std::deque<Message>& q, Message m) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      q.push_back(std::move(m));
    }
    cv_.notify_all();
  }

  Message pop(std::deque<Message>& q) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !q.empty(); });
    if (q.empty()) throw TransportClosed();
    Message m = std::move(q.front());
    q.pop_front();
    return m;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  std::deque<Message>& to_worker(int w) { return to_worker_[static_cast<std::size_t>(w)]; }
  std::deque<Message>& to_master(int w) { return to_master_[static_cast<std::size_t>(w)]; }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  bool closed_ = false;
  std::vector<std::deque<Message>> to_worker_;
  std::vector<std::deque<Message>> to_master_;
};

class ThreadWorkerLink final : public WorkerLink {
 public:
  ThreadWorkerLink(Fabric& f, int rank, int workers) : fabric_(f), rank_(rank), workers_(workers) {}
  int rank() const override { return rank_; }
  int workers() const override { return workers_; }
  using WorkerLink::send;
  using WorkerLink::receive;
  void send(Message m) override { fabric_.push(fabric_.to_master(rank_), std::move(m)); }
  Message receive() override { return fabric_.pop(fabric_.to_worker(rank_)); }

 private:
  Fabric& fabric_;
  int rank_;
  int workers_;
};

class ThreadMasterLink final : public MasterLink {
 public:
  ThreadMasterLink(Fabric& f, int workers) : fabric_(f), workers_(workers) {}
  int workers() const override { return workers_; }
  void send(int w, Message m) override { fabric_.push(fabric_.to_worker(w), std::move(m)); }
  Message receive(int w) override { return fabric_.pop(fabric_.to_master(w)); }

 private:
  Fabric& fabric_;
  int workers_;
};

class ThreadTransport final : public Transport {
 public:
  TransportKind kind() const override { return TransportKind::kThreads; }

  void execute(int workers, const WorkerTask& worker, const MasterTask& master) override {
    Fabric fabric(workers);
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&fabric, &worker, w, workers] {
        ThreadWorkerLink link(fabric, w, workers);
        try {
          worker(link);
        } catch (const TransportClosed&) {
        } catch (...) {
          fabric.push(fabric.to_master(w), failure_message(w, std::current_exception()));
        }
      });
    }

    std::exception_ptr failure;
    ThreadMasterLink link(fabric, workers);
    try {
      master(link);
    } catch (...) {
      failure = std::current_exception();
    }
    fabric.close();
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }
};

}  // namespace

std::unique_ptr<Transport> make_thread_transport() { return std::make_unique<ThreadTransport>(); }

}  // namespace pargp::runtime
