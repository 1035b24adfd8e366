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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pargp/partitioning.hpp"
#include "pargp/pitc_pic.hpp"
#include "pargp/runtime/ledger.hpp"
#include "pargp/runtime/transport.hpp"
#include "pargp/types.hpp"

namespace pargp::runtime {

enum class PartitionMode { kEven, kClustered };

std::string_view partition_name(PartitionMode mode);
PartitionMode parse_partition(std::string_view name);

struct RunOptions {
  std::size_t machines = 1;
  /// Unset means the method default: even for pPITC and pICF, clustered for pPIC.
  std::optional<PartitionMode> partition;
  std::uint64_t partition_seed = 0;
  TransportKind transport = TransportKind::kThreads;
  bool want_full_cov = false;
  /// pICF only: split the global-summary solve over contiguous query slices.
  bool partition_query = false;
};

struct RunResult {
  PredictiveDistribution prediction;
  Ledger ledger;
  Partition partition;
  /// pPITC/pPIC with want_full_cov: the covariance of each query block, in
  /// block order. Cross-block covariances are not assembled.
  std::vector<Matrix> block_covariances;
};

/// Partition for `options`, charging the clustering exchange to `ledger` when
/// the clustered scheme is used: one center of d scalars per machine, plus one
/// point-transfer message per point that leaves its even-partition block
/// (d + 2 scalars for a training point, d + 1 for a query point).
Partition make_partition(const Dataset& train, std::span<const InputPoint> query,
                         const RunOptions& options, PartitionMode fallback, Ledger& ledger);

/// pPITC: local summaries, gather, global summary, broadcast, per-machine
/// prediction, gather. Output follows `query` order.
RunResult run_ppitc(const Dataset& train, std::span<const InputPoint> query, const SupportSet& s,
                    const Hyperparameters& h, const RunOptions& options);

/// pPITC over a given partition; `query_size` is |U|.
RunResult run_ppitc(const Partition& partition, std::size_t query_size, const SupportSet& s,
                    const Hyperparameters& h, const RunOptions& options);

/// pPIC: as pPITC, with each machine correcting its query block with its own data.
RunResult run_ppic(const Dataset& train, std::span<const InputPoint> query, const SupportSet& s,
                   const Hyperparameters& h, const RunOptions& options);

RunResult run_ppic(const Partition& partition, std::size_t query_size, const SupportSet& s,
                   const Hyperparameters& h, const RunOptions& options);

/// pICF: distributed factorization, local summaries, gather, global summary,
/// broadcast, predictive components, master assembly. Every machine predicts
/// the whole query set, so the partition's query blocks are ignored.
RunResult run_picf(const Dataset& train, std::span<const InputPoint> query, std::size_t rank,
                   const Hyperparameters& h, const RunOptions& options);

RunResult run_picf(const Partition& partition, std::span<const InputPoint> query,
                   std::size_t rank, const Hyperparameters& h, const RunOptions& options);

}  // namespace pargp::runtime
