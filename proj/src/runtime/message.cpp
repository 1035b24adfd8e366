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

#include "pargp/runtime/message.hpp"

#include <cstring>
#include <stdexcept>

namespace pargp::runtime {
namespace {

struct FrameHeader {
  std::uint32_t kind;
  std::int32_t sender;
  std::uint64_t scalars;
  std::uint64_t error_bytes;
};

}  // namespace

std::string_view kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::kPitcLocalSummary: return "pitc-local-summary";
    case MessageKind::kIcfLocalSummary: return "icf-local-summary";
    case MessageKind::kIcfPivotCandidate: return "icf-pivot-candidate";
    case MessageKind::kIcfPivotRow: return "icf-pivot-row";
    case MessageKind::kPredictiveComponent: return "predictive-component";
    case MessageKind::kGlobalSummaryBroadcast: return "global-summary-broadcast";
    case MessageKind::kClusterCenter: return "cluster-center";
    case MessageKind::kPointTransfer: return "point-transfer";
    case MessageKind::kIcfSummarySlice: return "icf-summary-slice";
    case MessageKind::kIcfGlobalSlice: return "icf-global-slice";
    case MessageKind::kIcfFactorBlock: return "icf-factor-block";
    case MessageKind::kControl: return "control";
    case MessageKind::kFailure: return "failure";
  }
  return "unknown";
}

std::vector<std::byte> encode(const Message& m) {
  const FrameHeader head{static_cast<std::uint32_t>(m.kind), m.sender, m.payload.size(),
                         m.error.size()};
  std::vector<std::byte> out(sizeof head + m.payload.size() * sizeof(double) + m.error.size());
  std::byte* p = out.data();
  std::memcpy(p, &head, sizeof head);
  p += sizeof head;
  if (!m.payload.empty()) std::memcpy(p, m.payload.data(), m.payload.size() * sizeof(double));
  p += m.payload.size() * sizeof(double);
  if (!m.error.empty()) std::memcpy(p, m.error.data(), m.error.size());
  return out;
}

Message decode(const std::vector<std::byte>& frame) {
  FrameHeader head{};
  if (frame.size() < sizeof head) throw std::runtime_error("truncated message frame");
  std::memcpy(&head, frame.data(), sizeof head);
  if (head.kind >= kMessageKindCount) throw std::runtime_error("unknown message kind in frame");
  if (frame.size() != sizeof head + head.scalars * sizeof(double) + head.error_bytes)
    throw std::runtime_error("message frame length mismatch");
  Message m;
  m.kind = static_cast<MessageKind>(head.kind);
  m.sender = head.sender;
  m.payload.resize(head.scalars);
  const std::byte* p = frame.data() + sizeof head;
  if (head.scalars) std::memcpy(m.payload.data(), p, head.scalars * sizeof(double));
  p += head.scalars * sizeof(double);
  m.error.assign(reinterpret_cast<const char*>(p), head.error_bytes);
  return m;
}

}  // namespace pargp::runtime
