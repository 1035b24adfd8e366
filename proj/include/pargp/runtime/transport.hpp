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

#pragma once

#include <exception>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pargp/runtime/ledger.hpp"
#include "pargp/runtime/message.hpp"

namespace pargp::runtime {

/// A worker raised an error or vanished; the run is aborted.
class WorkerFailure : public std::runtime_error {
 public:
  WorkerFailure(int machine, const std::string& what, bool numerical = false)
      : std::runtime_error("machine " + std::to_string(machine) + " failed: " + what),
        machine_(machine),
        numerical_(numerical) {}
  int machine() const noexcept { return machine_; }
  /// The worker's error was a NumericalError (factorization, breakdown).
  bool numerical() const noexcept { return numerical_; }

 private:
  int machine_;
  bool numerical_;
};

/// The run was torn down while an endpoint was still waiting.
class TransportClosed : public std::runtime_error {
 public:
  TransportClosed() : std::runtime_error("transport closed") {}
};

/// Failure notice for `rank` describing the exception currently in flight.
Message failure_message(int rank, std::exception_ptr error);

/// A worker's view of the star topology: it talks to the master only.
class WorkerLink {
 public:
  virtual ~WorkerLink() = default;
  virtual int rank() const = 0;
  virtual int workers() const = 0;
  virtual void send(Message m) = 0;
  virtual Message receive() = 0;

  void send(MessageKind kind, std::vector<double> payload);
  /// Receives the next message and checks its kind.
  Message receive(MessageKind expected);
};

/// The master's view: point-to-point with every worker.
class MasterLink {
 public:
  virtual ~MasterLink() = default;
  virtual int workers() const = 0;
  virtual void send(int worker, Message m) = 0;
  virtual Message receive(int worker) = 0;
};

using WorkerTask = std::function<void(WorkerLink&)>;
using MasterTask = std::function<void(MasterLink&)>;

enum class TransportKind { kThreads, kProcesses };

std::string_view transport_name(TransportKind kind);
TransportKind parse_transport(std::string_view name);

/// Runs one master task and `workers` copies of a worker task connected by
/// message channels. Returns when the master task returns; rethrows the first
/// failure (a worker error surfaces as WorkerFailure).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void execute(int workers, const WorkerTask& worker, const MasterTask& master) = 0;
  virtual TransportKind kind() const = 0;
};

/// In-process worker threads exchanging messages through shared queues.
std::unique_ptr<Transport> make_thread_transport();
/// One forked process per worker, framed messages over Unix socket pairs.
std::unique_ptr<Transport> make_process_transport();
std::unique_ptr<Transport> make_transport(TransportKind kind);

/// Master-side collectives. Receives happen in ascending worker order, so
/// every reduction is independent of worker scheduling. Each collective
/// charges the ledger.
class Communicator {
 public:
  Communicator(MasterLink& link, Ledger& ledger) : link_(link), ledger_(ledger) {}

  int workers() const { return link_.workers(); }
  Ledger& ledger() { return ledger_; }

  /// One message of `kind` from every worker, in worker order.
  std::vector<Message> gather(MessageKind kind);
  /// Same traffic as gather(), charged as a reduction.
  std::vector<Message> reduce(MessageKind kind);
  void broadcast(MessageKind kind, const std::vector<double>& payload);

  /// Uncharged point-to-point traffic (control decisions, relayed payloads
  /// whose charge is booked by the enclosing collective).
  void send_control(int worker, std::vector<double> payload);
  /// Passes a worker's message on to another worker, uncharged.
  void forward(int worker, Message m);
  Message receive(int worker, MessageKind kind);

 private:
  MasterLink& link_;
  Ledger& ledger_;
};

}  // namespace pargp::runtime
