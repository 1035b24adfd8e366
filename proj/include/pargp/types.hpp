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
#include <vector>

#include <Eigen/Dense>

namespace pargp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Point identity. The Kronecker delta of the kernel compares ids, never coordinates.
using PointId = std::int64_t;

struct InputPoint {
  std::vector<double> coords;
  PointId id = 0;

  std::size_t dim() const noexcept { return coords.size(); }
};

using PointList = std::vector<InputPoint>;

/// Squared-exponential hyperparameters.
struct Hyperparameters {
  double signal_variance = 1.0;
  double noise_variance = 0.0;
  std::vector<double> length_scales;

  std::size_t dim() const noexcept { return length_scales.size(); }

  /// Throws std::invalid_argument on a nonpositive signal variance or
  /// length-scale, or a negative noise variance.
  void validate() const;
};

/// Observed data (D, y_D) with a constant prior mean.
struct Dataset {
  PointList inputs;
  Vector outputs;
  double prior_mean = 0.0;

  std::size_t size() const noexcept { return inputs.size(); }
  bool empty() const noexcept { return inputs.empty(); }

  /// y_D - mu_D.
  Vector residuals() const;

  /// Outputs length, distinct ids and a common dimension.
  void validate() const;
};

/// Gaussian predictive distribution over a query set.
struct PredictiveDistribution {
  Vector mean;
  Vector variances;
  std::optional<Matrix> covariance;

  std::size_t size() const noexcept { return static_cast<std::size_t>(mean.size()); }
};

}  // namespace pargp
