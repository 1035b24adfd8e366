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

#include "pargp/kernel.hpp"

#include <cmath>
#include <string>

#include "pargp/errors.hpp"

namespace pargp {
namespace {

[[noreturn]] void throw_mismatch(std::size_t a, std::size_t b) {
  throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// Caller has checked dimensions.
inline double se_unchecked(const InputPoint& x, const InputPoint& xp, const Hyperparameters& h) {
  double q = 0.0;
  for (std::size_t i = 0; i < x.coords.size(); ++i) {
    const double t = (x.coords[i] - xp.coords[i]) / h.length_scales[i];
    q += t * t;
  }
  return h.signal_variance * std::exp(-0.5 * q);
}

inline double kernel_unchecked(const InputPoint& x, const InputPoint& xp,
                               const Hyperparameters& h) {
  double k = se_unchecked(x, xp, h);
  if (x.id == xp.id) k += h.noise_variance;
  return k;
}

}  // namespace

void check_dimensions(std::span<const InputPoint> points, const Hyperparameters& h) {
  for (const auto& p : points)
    if (p.dim() != h.dim()) throw_mismatch(p.dim(), h.dim());
}

double signal_kernel(const InputPoint& x, const InputPoint& xp, const Hyperparameters& h) {
  if (x.dim() != xp.dim()) throw_mismatch(x.dim(), xp.dim());
  if (x.dim() != h.dim()) throw_mismatch(x.dim(), h.dim());
  return se_unchecked(x, xp, h);
}

double kernel(const InputPoint& x, const InputPoint& xp, const Hyperparameters& h) {
  if (x.dim() != xp.dim()) throw_mismatch(x.dim(), xp.dim());
  if (x.dim() != h.dim()) throw_mismatch(x.dim(), h.dim());
  return kernel_unchecked(x, xp, h);
}

Matrix cov_matrix(std::span<const InputPoint> a, std::span<const InputPoint> b,
                  const Hyperparameters& h) {
  check_dimensions(a, h);
  check_dimensions(b, h);
  Matrix k(static_cast<Index>(a.size()), static_cast<Index>(b.size()));
  for (Index j = 0; j < k.cols(); ++j)
    for (Index i = 0; i < k.rows(); ++i)
      k(i, j) = kernel_unchecked(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)], h);
  return k;
}

Matrix cov_matrix(std::span<const InputPoint> a, const Hyperparameters& h) {
  check_dimensions(a, h);
  const auto n = static_cast<Index>(a.size());
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      const double v =
          kernel_unchecked(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)], h);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace pargp
