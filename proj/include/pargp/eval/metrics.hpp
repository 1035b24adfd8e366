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

#include <cstddef>

#include "pargp/types.hpp"

namespace pargp::eval {

/// Variances below this are raised to it before MNLP is evaluated.
inline constexpr double kVarianceFloor = 1e-12;

/// sqrt(mean((y - mu)^2)).
double rmse(const PredictiveDistribution& predicted, const Vector& truth);

struct MnlpResult {
  double value = 0.0;
  /// How many variances were raised to kVarianceFloor.
  std::size_t floored = 0;
};

/// 0.5 mean((y - mu)^2 / var + log(2 pi var)) with var floored at kVarianceFloor.
MnlpResult mnlp(const PredictiveDistribution& predicted, const Vector& truth);

/// Number of strictly negative predictive variances.
std::size_t negative_variance_count(const PredictiveDistribution& predicted);

}  // namespace pargp::eval
