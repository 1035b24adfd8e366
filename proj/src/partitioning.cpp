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

#include "pargp/partitioning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "pargp/errors.hpp"
#include "pargp/kernel.hpp"

namespace pargp {
namespace {

double squared_distance(const InputPoint& a, const InputPoint& b) {
  if (a.dim() != b.dim())
    throw DimensionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double t = a.coords[i] - b.coords[i];
    s += t * t;
  }
  return s;
}

void check_machine_count(std::size_t n_train, std::size_t machines) {
  if (machines == 0) throw std::invalid_argument("machine count must be at least 1");
  if (machines > n_train)
    throw std::invalid_argument("cannot split " + std::to_string(n_train) +
                                " training points across " + std::to_string(machines) +
                                " machines");
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

Partition build_partition(const Dataset& train, std::span<const InputPoint> query,
                          std::size_t machines, const std::vector<std::size_t>& train_owner,
                          const std::vector<std::size_t>& query_owner) {
  Partition p;
  p.blocks.resize(machines);
  p.query_blocks.resize(machines);
  std::vector<std::vector<double>> outputs(machines);
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto& block = p.blocks[train_owner[i]];
    block.data.inputs.push_back(train.inputs[i]);
    block.source_index.push_back(i);
    outputs[train_owner[i]].push_back(train.outputs(static_cast<Index>(i)));
  }
  for (std::size_t m = 0; m < machines; ++m) {
    auto& block = p.blocks[m];
    block.data.prior_mean = train.prior_mean;
    block.data.outputs = Eigen::Map<const Vector>(outputs[m].data(),
                                                  static_cast<Index>(outputs[m].size()));
  }
  for (std::size_t i = 0; i < query.size(); ++i) {
    auto& qb = p.query_blocks[query_owner[i]];
    qb.points.push_back(query[i]);
    qb.source_index.push_back(i);
  }
  return p;
}

}  // namespace

Dataset Partition::stacked_train() const {
  Dataset out;
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.data.size();
  out.inputs.reserve(n);
  out.outputs.resize(static_cast<Index>(n));
  Index row = 0;
  for (const auto& b : blocks) {
    out.inputs.insert(out.inputs.end(), b.data.inputs.begin(), b.data.inputs.end());
    out.outputs.segment(row, b.data.outputs.size()) = b.data.outputs;
    row += b.data.outputs.size();
  }
  if (!blocks.empty()) out.prior_mean = blocks.front().data.prior_mean;
  return out;
}

PointList Partition::stacked_query() const {
  PointList out;
  for (const auto& q : query_blocks) out.insert(out.end(), q.points.begin(), q.points.end());
  return out;
}

std::vector<std::size_t> Partition::stacked_query_index() const {
  std::vector<std::size_t> out;
  for (const auto& q : query_blocks)
    out.insert(out.end(), q.source_index.begin(), q.source_index.end());
  return out;
}

void Partition::validate_covers(const Dataset& train, std::span<const InputPoint> query) const {
  if (query_blocks.size() != blocks.size())
    throw std::invalid_argument("partition has " + std::to_string(blocks.size()) +
                                " training blocks but " + std::to_string(query_blocks.size()) +
                                " query blocks");
  std::unordered_map<PointId, int> train_ids;
  for (const auto& x : train.inputs) train_ids[x.id] += 1;
  for (const auto& b : blocks)
    for (const auto& x : b.data.inputs)
      if (--train_ids[x.id] < 0)
        throw std::invalid_argument("partition block holds unknown or repeated id " +
                                    std::to_string(x.id));
  for (const auto& [id, count] : train_ids)
    if (count != 0) throw std::invalid_argument("partition misses training id " + std::to_string(id));

  std::unordered_map<PointId, int> query_ids;
  for (const auto& x : query) query_ids[x.id] += 1;
  for (const auto& q : query_blocks)
    for (const auto& x : q.points)
      if (--query_ids[x.id] < 0)
        throw std::invalid_argument("partition query block holds unknown or repeated id " +
                                    std::to_string(x.id));
  for (const auto& [id, count] : query_ids)
    if (count != 0) throw std::invalid_argument("partition misses query id " + std::to_string(id));
}

Partition partition_even(const Dataset& train, std::span<const InputPoint> query,
                         std::size_t machines) {
  check_machine_count(train.size(), machines);
  std::vector<std::size_t> train_owner(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) train_owner[i] = i % machines;
  std::vector<std::size_t> query_owner(query.size());
  for (std::size_t i = 0; i < query.size(); ++i) query_owner[i] = i % machines;
  return build_partition(train, query, machines, train_owner, query_owner);
}

std::vector<std::size_t> assign_to_centers(std::span<const InputPoint> points,
                                           std::span<const InputPoint> centers,
                                           std::size_t capacity) {
  const std::size_t m = centers.size();
  if (m == 0) throw std::invalid_argument("no cluster centers");
  if (capacity * m < points.size())
    throw std::invalid_argument("cluster capacity " + std::to_string(capacity) + " x " +
                                std::to_string(m) + " cannot hold " +
                                std::to_string(points.size()) + " points");

  // Per point: centers ranked by (distance, index).
  std::vector<std::vector<std::pair<double, std::size_t>>> ranked(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& r = ranked[i];
    r.reserve(m);
    for (std::size_t c = 0; c < m; ++c) r.emplace_back(squared_distance(points[i], centers[c]), c);
    std::sort(r.begin(), r.end());
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranked[a].front().first < ranked[b].front().first;
  });

  std::vector<std::size_t> load(m, 0);
  std::vector<std::size_t> owner(points.size(), m);
  for (std::size_t i : order) {
    for (const auto& [dist, c] : ranked[i]) {
      if (load[c] < capacity) {
        owner[i] = c;
        ++load[c];
        break;
      }
    }
  }
  return owner;
}

PointList draw_cluster_centers(const Partition& even, std::uint64_t seed) {
  PointList centers;
  centers.reserve(even.machines());
  for (std::size_t m = 0; m < even.machines(); ++m) {
    const auto& inputs = even.blocks[m].data.inputs;
    if (inputs.empty()) throw std::invalid_argument("cannot draw a center from an empty block");
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(m)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, inputs.size() - 1);
    centers.push_back(inputs[pick(rng)]);
  }
  return centers;
}

Partition partition_clustered(const Dataset& train, std::span<const InputPoint> query,
                              std::size_t machines, std::uint64_t seed) {
  const Partition even = partition_even(train, query, machines);
  if (machines == 1) return even;
  const PointList centers = draw_cluster_centers(even, seed);
  const auto train_owner = assign_to_centers(train.inputs, centers, ceil_div(train.size(), machines));
  const auto query_owner =
      query.empty() ? std::vector<std::size_t>{}
                    : assign_to_centers(query, centers, ceil_div(query.size(), machines));
  return build_partition(train, query, machines, train_owner, query_owner);
}

PointList select_support_set(std::span<const InputPoint> candidates, std::size_t k,
                             const Hyperparameters& h) {
  h.validate();
  check_dimensions(candidates, h);
  if (k == 0) throw std::invalid_argument("support set size must be at least 1");
  if (k > candidates.size())
    throw std::invalid_argument("support set size " + std::to_string(k) + " exceeds " +
                                std::to_string(candidates.size()) + " candidates");
  {
    std::unordered_set<PointId> ids;
    for (const auto& c : candidates)
      if (!ids.insert(c.id).second)
        throw std::invalid_argument("duplicate candidate id " + std::to_string(c.id));
  }

  const std::size_t n = candidates.size();
  Matrix v = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(k));  // rows: L^{-1} Sigma_Sc
  std::vector<double> var(n);
  for (std::size_t c = 0; c < n; ++c) var[c] = kernel(candidates[c], candidates[c], h);
  std::vector<bool> taken(n, false);

  PointList chosen;
  chosen.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    std::size_t best = n;
    for (std::size_t c = 0; c < n; ++c)
      if (!taken[c] && (best == n || var[c] > var[best])) best = c;
    taken[best] = true;
    chosen.push_back(candidates[best]);

    const double pivot = var[best] > 0.0 ? std::sqrt(var[best]) : 0.0;
    const auto col = static_cast<Index>(t);
    for (std::size_t c = 0; c < n; ++c) {
      if (taken[c]) continue;
      const auto row = static_cast<Index>(c);
      if (pivot == 0.0) continue;
      const double cross = kernel(candidates[best], candidates[c], h) -
                           v.row(static_cast<Index>(best)).head(col).dot(v.row(row).head(col));
      const double value = cross / pivot;
      v(row, col) = value;
      var[c] -= value * value;
    }
  }
  return chosen;
}

PointList support_candidates(const Dataset& train, std::size_t pool_size, std::uint64_t seed,
                             PointId first_id) {
  const std::size_t n = std::min(pool_size, train.size());
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  PointList out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(InputPoint{train.inputs[idx[k]].coords, first_id + static_cast<PointId>(k)});
  return out;
}

}  // namespace pargp
