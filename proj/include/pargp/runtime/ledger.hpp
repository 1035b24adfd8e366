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

#include <array>
#include <cstdint>
#include <string>

#include "pargp/runtime/message.hpp"

namespace pargp::runtime {

/// Logical message and payload accounting for one run.
///
/// A gather of M messages charges M messages of that kind; a broadcast charges
/// one message (its payload is shipped once, fan-out belongs to the transport);
/// a max-reduction charges its M candidate messages. Counters only grow until
/// reset().
class Ledger {
 public:
  struct KindTotals {
    std::uint64_t messages = 0;
    std::uint64_t scalars = 0;
    /// Smallest and largest single-message payload seen.
    std::uint64_t smallest = 0;
    std::uint64_t largest = 0;
    bool operator==(const KindTotals&) const = default;
  };

  void record_message(MessageKind kind, std::uint64_t scalars);
  void record_gather() { ++gathers_; }
  void record_broadcast() { ++broadcasts_; }
  void record_reduction() { ++reductions_; }

  const KindTotals& totals(MessageKind kind) const {
    return kinds_[static_cast<std::size_t>(kind)];
  }
  std::uint64_t messages(MessageKind kind) const { return totals(kind).messages; }
  std::uint64_t scalars(MessageKind kind) const { return totals(kind).scalars; }
  std::uint64_t gathers() const noexcept { return gathers_; }
  std::uint64_t broadcasts() const noexcept { return broadcasts_; }
  std::uint64_t reductions() const noexcept { return reductions_; }
  std::uint64_t total_scalars() const;

  void reset();

  /// Flat `key = value` report, one line per nonzero kind counter plus the
  /// three collective counters.
  std::string report() const;

  bool operator==(const Ledger&) const = default;

 private:
  std::array<KindTotals, kMessageKindCount> kinds_{};
  std::uint64_t gathers_ = 0;
  std::uint64_t broadcasts_ = 0;
  std::uint64_t reductions_ = 0;
};

}  // namespace pargp::runtime
