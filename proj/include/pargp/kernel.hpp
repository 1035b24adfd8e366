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

#include <span>

#include "pargp/types.hpp"

namespace pargp {

/// Squared-exponential covariance plus sigma_n^2 when both points carry the same id.
double kernel(const InputPoint& x, const InputPoint& xp, const Hyperparameters& h);

/// The signal part of kernel() only, without the noise delta.
double signal_kernel(const InputPoint& x, const InputPoint& xp, const Hyperparameters& h);

/// Entry (i, j) = kernel(a[i], b[j]). Passing the same list twice yields an
/// exactly symmetric matrix.
Matrix cov_matrix(std::span<const InputPoint> a, std::span<const InputPoint> b,
                  const Hyperparameters& h);

/// Symmetric cov_matrix(a, a); only the lower triangle is evaluated.
Matrix cov_matrix(std::span<const InputPoint> a, const Hyperparameters& h);

/// Throws DimensionError unless every point matches h's dimension.
void check_dimensions(std::span<const InputPoint> points, const Hyperparameters& h);

}  // namespace pargp
