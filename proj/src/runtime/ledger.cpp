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

#include "pargp/runtime/ledger.hpp"

#include <algorithm>
#include <sstream>

namespace pargp::runtime {

void Ledger::record_message(MessageKind kind, std::uint64_t scalars) {
  auto& t = kinds_[static_cast<std::size_t>(kind)];
  t.smallest = t.messages == 0 ? scalars : std::min(t.smallest, scalars);
  t.largest = std::max(t.largest, scalars);
  ++t.messages;
  t.scalars += scalars;
}

std::uint64_t Ledger::total_scalars() const {
  std::uint64_t total = 0;
  for (const auto& t : kinds_) total += t.scalars;
  return total;
}

void Ledger::reset() { *this = Ledger{}; }

std::string Ledger::report() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < kMessageKindCount; ++k) {
    const auto& t = kinds_[k];
    if (t.messages == 0) continue;
    const auto name = kind_name(static_cast<MessageKind>(k));
    out << name << ".messages = " << t.messages << '\n';
    out << name << ".scalars = " << t.scalars << '\n';
  }
  out << "collective.gathers = " << gathers_ << '\n';
  out << "collective.broadcasts = " << broadcasts_ << '\n';
  out << "collective.reductions = " << reductions_ << '\n';
  return out.str();
}

}  // namespace pargp::runtime
