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

#include "pargp/types.hpp"

namespace pargp {

/// Cholesky factor of a symmetric positive-definite matrix.
///
/// On factorization failure the jitter policy is applied: 1e-10 * mean(diag)
/// is added to the diagonal and doubled on each further failure, up to six
/// attempts, after which NotPositiveDefinite is thrown. Every matrix inverse in
/// the library goes through this class; nothing forms an explicit inverse.
class SpdFactor {
 public:
  static constexpr int kMaxJitterAttempts = 6;
  static constexpr double kJitterScale = 1e-10;
  static constexpr double kSymmetryTolerance = 1e-10;

  SpdFactor() = default;
  explicit SpdFactor(const Matrix& a);

  Index order() const noexcept { return llt_.rows(); }

  /// Diagonal jitter that was needed for the factorization to succeed (0 if none).
  double jitter() const noexcept { return jitter_; }

  Matrix solve(const Matrix& b) const;
  Vector solve(const Vector& b) const;

  /// Lower-triangular L with A + jitter*I = L L^T.
  Matrix lower() const { return llt_.matrixL(); }

  /// L^{-1} b, the half solve used to form b^T A^{-1} b as a Gram product.
  Matrix half_solve(const Matrix& b) const;

 private:
  Eigen::LLT<Matrix> llt_;
  double jitter_ = 0.0;
};

/// X with A X = B for symmetric positive-definite A.
Matrix pd_solve(const Matrix& a, const Matrix& b);

/// max |a_ij - a_ji| <= tol * max |a_ij|.
bool is_symmetric(const Matrix& a, double tol);

/// (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

/// Diagonal of B^T A^{-1} B without forming the full product.
Vector quadratic_diagonal(const SpdFactor& a, const Matrix& b);

}  // namespace pargp
