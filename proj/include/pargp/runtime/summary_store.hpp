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

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "pargp/partitioning.hpp"
#include "pargp/pitc_pic.hpp"
#include "pargp/types.hpp"

namespace pargp::runtime {

/// Retained per-block PITC summaries for online learning by block append.
///
/// New data arrives as whole new blocks. Only the new block's local summary
/// is computed; it is added onto the global summary, so old blocks are never
/// revisited. Predictions match a from-scratch run over the extended blocks.
class SummaryStore {
 public:
  SummaryStore(SupportSet s, const Hyperparameters& h, double prior_mean = 0.0);

  /// Store holding the training blocks of `partition`.
  static SummaryStore from_partition(const Partition& partition, const SupportSet& s,
                                     const Hyperparameters& h);

  const SupportSet& support() const noexcept { return s_; }
  const Hyperparameters& hyperparameters() const noexcept { return h_; }
  double prior_mean() const noexcept { return prior_mean_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const std::vector<Dataset>& blocks() const noexcept { return blocks_; }
  const std::vector<PitcLocalSummary>& locals() const noexcept { return locals_; }
  const PitcGlobalSummary& global() const noexcept { return global_; }

  /// Block holding `id`, if any.
  std::optional<std::size_t> block_of(PointId id) const;

  /// Throws NumericalError unless the global summary equals a fresh
  /// reduction of the retained local summaries.
  void verify() const;

  /// pPITC prediction over `query` from the current global summary.
  PredictiveDistribution predict_ppitc(std::span<const InputPoint> query,
                                       bool want_full_cov = false) const;

  /// pPIC prediction. `query_blocks[m]` is paired with stored block m; the
  /// output follows the blocks' source indices over a query set of `query_size`.
  PredictiveDistribution predict_ppic(std::span<const QueryBlock> query_blocks,
                                      std::size_t query_size) const;

  /// Appends a block; see assimilate().
  void append(const Dataset& block);

 private:
  SupportSet s_;
  Hyperparameters h_;
  double prior_mean_;
  std::vector<Dataset> blocks_;
  std::vector<PitcLocalSummary> locals_;
  PitcGlobalSummary global_;
  std::unordered_map<PointId, std::size_t> registry_;
};

/// Store with `new_block` appended as the next block. Ids already registered
/// raise std::invalid_argument; an empty block returns the store unchanged.
SummaryStore assimilate(const SummaryStore& store, const Dataset& new_block, const SupportSet& s,
                        const Hyperparameters& h);

}  // namespace pargp::runtime
