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

#include "pargp/types.hpp"

namespace pargp::eval {

/// Largest joint draw; it needs a dense factorization of the full covariance.
inline constexpr std::size_t kMaxSyntheticPoints = 4096;

struct SyntheticData {
  Dataset train;
  Dataset test;
};

/// Inputs uniform in [0, 10]^d, outputs drawn jointly from the GP prior
/// (noise included). The first n_train points form the training set. Training
/// ids are 0..n_train-1 and test ids follow. A zero signal variance is
/// accepted here and yields pure noise around the prior mean.
SyntheticData generate_synthetic(std::size_t d, std::size_t n_train, std::size_t n_test,
                                 const Hyperparameters& h, std::uint64_t seed,
                                 double prior_mean = 0.0);

/// Larger sets built from independent draws of at most kMaxSyntheticPoints
/// each, tile t seeded with (seed, t). Ids stay unique across tiles.
SyntheticData generate_synthetic_tiled(std::size_t d, std::size_t n_train, std::size_t n_test,
                                       const Hyperparameters& h, std::uint64_t seed,
                                       double prior_mean = 0.0);

}  // namespace pargp::eval
