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

#include "pargp/eval/synthetic.hpp"

#include <array>
#include <random>
#include <string>

#include "pargp/errors.hpp"
#include "pargp/kernel.hpp"
#include "pargp/linalg.hpp"

namespace pargp::eval {
namespace {

void check_hyperparameters(const Hyperparameters& h, std::size_t d) {
  if (!(h.signal_variance >= 0.0)) throw std::invalid_argument("signal variance must be nonnegative");
  if (!(h.noise_variance >= 0.0)) throw std::invalid_argument("noise variance must be nonnegative");
  for (double l : h.length_scales)
    if (!(l > 0.0)) throw std::invalid_argument("length-scales must be positive");
  if (h.dim() != d)
    throw DimensionError("dimension mismatch: " + std::to_string(d) + " vs " + std::to_string(h.dim()));
}

}  // namespace

SyntheticData generate_synthetic(std::size_t d, std::size_t n_train, std::size_t n_test,
                                 const Hyperparameters& h, std::uint64_t seed, double prior_mean) {
  check_hyperparameters(h, d);
  const std::size_t n = n_train + n_test;
  if (n > kMaxSyntheticPoints)
    throw std::invalid_argument("synthetic draw of " + std::to_string(n) + " points exceeds the cap of " +
                                std::to_string(kMaxSyntheticPoints));
  if (d == 0) throw std::invalid_argument("dimension must be at least 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  PointList points(n);
  for (std::size_t i = 0; i < n; ++i) {
    points[i].id = static_cast<PointId>(i);
    points[i].coords.resize(d);
    for (double& c : points[i].coords) c = coord(rng);
  }

  std::normal_distribution<double> normal;
  Vector z(static_cast<Index>(n));
  for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);

  Vector y = Vector::Constant(static_cast<Index>(n), prior_mean);
  if (n > 0 && h.signal_variance + h.noise_variance > 0.0) {
    Matrix k;
    if (h.signal_variance > 0.0) {
      k = cov_matrix(points, h);
    } else {
      k = Matrix::Identity(static_cast<Index>(n), static_cast<Index>(n)) * h.noise_variance;
    }
    y += SpdFactor(k).lower() * z;
  }

  SyntheticData out;
  for (auto* set : {&out.train, &out.test}) set->prior_mean = prior_mean;
  out.train.inputs.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.inputs.assign(points.begin() + static_cast<std::ptrdiff_t>(n_train), points.end());
  out.train.outputs = y.head(static_cast<Index>(n_train));
  out.test.outputs = y.tail(static_cast<Index>(n_test));
  return out;
}

SyntheticData generate_synthetic_tiled(std::size_t d, std::size_t n_train, std::size_t n_test,
                                       const Hyperparameters& h, std::uint64_t seed,
                                       double prior_mean) {
  const std::size_t n = n_train + n_test;
  if (n <= kMaxSyntheticPoints) return generate_synthetic(d, n_train, n_test, h, seed, prior_mean);

  const std::size_t tiles = (n + kMaxSyntheticPoints - 1) / kMaxSyntheticPoints;
  SyntheticData out;
  out.train.prior_mean = out.test.prior_mean = prior_mean;
  std::vector<double> train_y, test_y;
  for (std::size_t t = 0; t < tiles; ++t) {
    // Spread both sets evenly over the tiles.
    const std::size_t tr = n_train * (t + 1) / tiles - n_train * t / tiles;
    const std::size_t te = n_test * (t + 1) / tiles - n_test * t / tiles;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    const std::uint64_t tile_seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];

    SyntheticData tile = generate_synthetic(d, tr, te, h, tile_seed, prior_mean);
    for (auto& p : tile.train.inputs) out.train.inputs.push_back(std::move(p));
    for (auto& p : tile.test.inputs) out.test.inputs.push_back(std::move(p));
    train_y.insert(train_y.end(), tile.train.outputs.data(), tile.train.outputs.data() + tile.train.outputs.size());
    test_y.insert(test_y.end(), tile.test.outputs.data(), tile.test.outputs.data() + tile.test.outputs.size());
  }
  // Renumber as in a single draw: training ids first, then test ids.
  PointId id = 0;
  for (auto& p : out.train.inputs) p.id = id++;
  for (auto& p : out.test.inputs) p.id = id++;
  out.train.outputs = Eigen::Map<const Vector>(train_y.data(), static_cast<Index>(train_y.size()));
  out.test.outputs = Eigen::Map<const Vector>(test_y.data(), static_cast<Index>(test_y.size()));
  return out;
}

}  // namespace pargp::eval
