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
#include <span>
#include <vector>

#include "pargp/types.hpp"

namespace pargp {

/// One machine's training block. `source_index[k]` is the position of
/// data.inputs[k] in the original training set.
struct DataBlock {
  Dataset data;
  std::vector<std::size_t> source_index;
};

/// One machine's query slice, with positions in the original query list.
struct QueryBlock {
  PointList points;
  std::vector<std::size_t> source_index;
};

/// Pairing (D_m, U_m) for m = 0..M-1.
struct Partition {
  std::vector<DataBlock> blocks;
  std::vector<QueryBlock> query_blocks;

  std::size_t machines() const noexcept { return blocks.size(); }

  /// Training blocks concatenated in machine order.
  Dataset stacked_train() const;
  /// Query blocks concatenated in machine order.
  PointList stacked_query() const;
  /// Original query position of each stacked query row.
  std::vector<std::size_t> stacked_query_index() const;

  /// Throws unless blocks are disjoint and cover `train` and `query` exactly (by id).
  void validate_covers(const Dataset& train, std::span<const InputPoint> query) const;
};

/// Round-robin assignment by index: point i goes to block i mod M.
Partition partition_even(const Dataset& train, std::span<const InputPoint> query, std::size_t machines);

/// Capacity-constrained nearest-center assignment.
///
/// Points are visited in ascending distance to their nearest center (ties by
/// index). Each goes to the nearest center with room left (ties by center
/// index). Returns the chosen center per point.
std::vector<std::size_t> assign_to_centers(std::span<const InputPoint> points,
                                           std::span<const InputPoint> centers,
                                           std::size_t capacity);

/// The center each machine draws from its even-partition block under `seed`.
PointList draw_cluster_centers(const Partition& even, std::uint64_t seed);

/// Even partition, one seeded center per block, then joint nearest-center
/// assignment of training and query points with caps ceil(|D|/M), ceil(|U|/M).
Partition partition_clustered(const Dataset& train, std::span<const InputPoint> query,
                              std::size_t machines, std::uint64_t seed);

/// Greedy maximum-posterior-variance selection of k points.
///
/// Starting from an empty set, each round adds the remaining candidate with
/// the largest Sigma_{xx|S} (ties to the lowest index), maintaining the
/// Cholesky factor of Sigma_SS one row at a time.
PointList select_support_set(std::span<const InputPoint> candidates, std::size_t k,
                             const Hyperparameters& h);

/// Seeded uniform subsample of `train` inputs of size min(pool_size, |D|) to
/// serve as support-set candidates. Candidates get fresh ids starting at
/// `first_id`, so the selected support set never shares identity with data.
PointList support_candidates(const Dataset& train, std::size_t pool_size, std::uint64_t seed,
                             PointId first_id);

}  // namespace pargp
