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

#include "pargp/runtime/summary_store.hpp"

#include <stdexcept>
#include <string>

#include "pargp/errors.hpp"
#include "pargp/kernel.hpp"

namespace pargp::runtime {
namespace {

bool same_support(const SupportSet& a, const SupportSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.points()[i].id != b.points()[i].id || a.points()[i].coords != b.points()[i].coords)
      return false;
  return true;
}

}  // namespace

SummaryStore::SummaryStore(SupportSet s, const Hyperparameters& h, double prior_mean)
    : s_(std::move(s)), h_(h), prior_mean_(prior_mean) {
  s_.check_compatible(h_);
  global_ = global_summary({}, s_, h_);
}

SummaryStore SummaryStore::from_partition(const Partition& partition, const SupportSet& s,
                                          const Hyperparameters& h) {
  const double mu = partition.blocks.empty() ? 0.0 : partition.blocks.front().data.prior_mean;
  SummaryStore store(s, h, mu);
  for (const auto& b : partition.blocks) store.append(b.data);
  return store;
}

std::optional<std::size_t> SummaryStore::block_of(PointId id) const {
  auto it = registry_.find(id);
  if (it == registry_.end()) return std::nullopt;
  return it->second;
}

void SummaryStore::append(const Dataset& block) {
  if (block.empty()) return;
  block.validate();
  check_dimensions(block.inputs, h_);
  if (block.prior_mean != prior_mean_)
    throw std::invalid_argument("new block's prior mean differs from the store's");
  for (const auto& x : block.inputs)
    if (registry_.contains(x.id))
      throw std::invalid_argument("point id " + std::to_string(x.id) + " already lives in block " +
                                  std::to_string(registry_.at(x.id)));

  PitcLocalSummary local = local_summary(block, s_, h_);
  global_.y_ddot += local.y_dot;
  global_.sigma_ddot += local.sigma_dot;
  const std::size_t index = blocks_.size();
  for (const auto& x : block.inputs) registry_.emplace(x.id, index);
  blocks_.push_back(block);
  locals_.push_back(std::move(local));
}

void SummaryStore::verify() const {
  const PitcGlobalSummary fresh = global_summary(locals_, s_, h_);
  if (fresh.y_ddot != global_.y_ddot || fresh.sigma_ddot != global_.sigma_ddot)
    throw NumericalError("global summary drifted from the retained local summaries");
}

PredictiveDistribution SummaryStore::predict_ppitc(std::span<const InputPoint> query,
                                                   bool want_full_cov) const {
  return ppitc_predict_block(query, s_, global_, h_, prior_mean_, want_full_cov);
}

PredictiveDistribution SummaryStore::predict_ppic(std::span<const QueryBlock> query_blocks,
                                                  std::size_t query_size) const {
  if (query_blocks.size() != blocks_.size())
    throw DimensionError(std::to_string(query_blocks.size()) + " query blocks for " +
                         std::to_string(blocks_.size()) + " stored blocks");
  PredictiveDistribution out;
  out.mean = Vector::Zero(static_cast<Index>(query_size));
  out.variances = Vector::Zero(static_cast<Index>(query_size));
  for (std::size_t m = 0; m < blocks_.size(); ++m) {
    const auto p = ppic_predict_block(blocks_[m], query_blocks[m].points, s_, locals_[m], global_, h_);
    pargp::detail::scatter_rows(p, query_blocks[m].source_index, out);
  }
  return out;
}

SummaryStore assimilate(const SummaryStore& store, const Dataset& new_block, const SupportSet& s,
                        const Hyperparameters& h) {
  store.support().check_compatible(h);
  if (!same_support(store.support(), s))
    throw std::invalid_argument("support set differs from the one the store was built with");
  SummaryStore out = store;
  out.append(new_block);
  return out;
}

}  // namespace pargp::runtime
