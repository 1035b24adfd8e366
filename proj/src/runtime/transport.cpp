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

#include "pargp/runtime/transport.hpp"

#include <string>

#include "pargp/errors.hpp"

namespace pargp::runtime {
namespace {

[[noreturn]] void throw_unexpected(MessageKind expected, const Message& got) {
  throw std::runtime_error("protocol error: expected " + std::string(kind_name(expected)) +
                           " but received " + std::string(kind_name(got.kind)));
}

}  // namespace

Message failure_message(int rank, std::exception_ptr error) {
  Message m;
  m.kind = MessageKind::kFailure;
  m.sender = rank;
  try {
    std::rethrow_exception(error);
  } catch (const NumericalError& e) {
    m.error = e.what();
    m.payload = {1.0};
  } catch (const std::exception& e) {
    m.error = e.what();
  } catch (...) {
    m.error = "unknown exception";
  }
  return m;
}

void WorkerLink::send(MessageKind kind, std::vector<double> payload) {
  Message m;
  m.kind = kind;
  m.sender = rank();
  m.payload = std::move(payload);
  send(std::move(m));
}

Message WorkerLink::receive(MessageKind expected) {
  Message m = receive();
  if (m.kind != expected) throw_unexpected(expected, m);
  return m;
}

std::string_view transport_name(TransportKind kind) {
  return kind == TransportKind::kThreads ? "threads" : "processes";
}

TransportKind parse_transport(std::string_view name) {
  if (name == "threads") return TransportKind::kThreads;
  if (name == "processes") return TransportKind::kProcesses;
  throw std::invalid_argument("unknown transport '" + std::string(name) +
                              "' (expected threads or processes)");
}

std::unique_ptr<Transport> make_transport(TransportKind kind) {
  return kind == TransportKind::kThreads ? make_thread_transport() : make_process_transport();
}

Message Communicator::receive(int worker, MessageKind kind) {
  Message m = link_.receive(worker);
  if (m.kind == MessageKind::kFailure)
    throw WorkerFailure(worker, m.error, !m.payload.empty() && m.payload[0] == 1.0);
  if (m.kind != kind) throw_unexpected(kind, m);
  return m;
}

std::vector<Message> Communicator::gather(MessageKind kind) {
  std::vector<Message> out;
  out.reserve(static_cast<std::size_t>(workers()));
  for (int w = 0; w < workers(); ++w) {
    out.push_back(receive(w, kind));
    ledger_.record_message(kind, out.back().payload_scalars());
  }
  ledger_.record_gather();
  return out;
}

std::vector<Message> Communicator::reduce(MessageKind kind) {
  std::vector<Message> out;
  out.reserve(static_cast<std::size_t>(workers()));
  for (int w = 0; w < workers(); ++w) {
    out.push_back(receive(w, kind));
    ledger_.record_message(kind, out.back().payload_scalars());
  }
  ledger_.record_reduction();
  return out;
}

void Communicator::broadcast(MessageKind kind, const std::vector<double>& payload) {
  for (int w = 0; w < workers(); ++w) {
    Message m;
    m.kind = kind;
    m.sender = kMaster;
    m.payload = payload;
    link_.send(w, std::move(m));
  }
  ledger_.record_message(kind, payload.size());
  ledger_.record_broadcast();
}

void Communicator::send_control(int worker, std::vector<double> payload) {
  Message m;
  m.kind = MessageKind::kControl;
  m.sender = kMaster;
  m.payload = std::move(payload);
  link_.send(worker, std::move(m));
}

void Communicator::forward(int worker, Message m) {
  link_.send(worker, std::move(m));
}

}  // namespace pargp::runtime
