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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pargp::runtime {

/// Master endpoint address; workers are 0..M-1.
inline constexpr int kMaster = -1;

enum class MessageKind : std::uint8_t {
  kPitcLocalSummary,
  kIcfLocalSummary,
  kIcfPivotCandidate,
  kIcfPivotRow,
  kPredictiveComponent,
  kGlobalSummaryBroadcast,
  kClusterCenter,
  kPointTransfer,
  kIcfSummarySlice,
  kIcfGlobalSlice,
  kIcfFactorBlock,
  kControl,  // protocol decisions; never charged to the ledger
  kFailure,  // worker abort notice carrying an error text
};

inline constexpr std::size_t kMessageKindCount = 13;

std::string_view kind_name(MessageKind kind);

/// A unit of worker/master traffic. The payload is the exact list of reals
/// the protocol step ships, so payload_scalars() is what the ledger charges.
struct Message {
  MessageKind kind = MessageKind::kControl;
  int sender = kMaster;
  std::vector<double> payload;
  std::string error;

  std::size_t payload_scalars() const noexcept { return payload.size(); }
};

/// Wire frame: kind, sender, payload length, error length, payload, error.
std::vector<std::byte> encode(const Message& m);
Message decode(const std::vector<std::byte>& frame);

}  // namespace pargp::runtime
