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

#include "pargp/linalg.hpp"

#include <sstream>
#include <string>

#include "pargp/errors.hpp"

namespace pargp {

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = a.cwiseAbs().maxCoeff();
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

Matrix symmetrize(const Matrix& a) {
  return 0.5 * (a + a.transpose());
}

SpdFactor::SpdFactor(const Matrix& a) {
  if (a.rows() != a.cols())
    throw DimensionError("pd_solve needs a square matrix, got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  if (!is_symmetric(a, kSymmetryTolerance))
    throw std::invalid_argument("pd_solve needs a symmetric matrix");
  if (a.rows() == 0) {
    llt_.compute(a);
    return;
  }

  llt_.compute(a);
  if (llt_.info() == Eigen::Success) return;

  const double mean_diag = a.diagonal().mean();
  double jitter = kJitterScale * (mean_diag > 0.0 ? mean_diag : 1.0);
  for (int attempt = 0; attempt < kMaxJitterAttempts; ++attempt, jitter *= 2.0) {
    Matrix shifted = a;
    shifted.diagonal().array() += jitter;
    llt_.compute(shifted);
    if (llt_.info() == Eigen::Success) {
      jitter_ = jitter;
      return;
    }
  }
  std::ostringstream msg;
  msg << "matrix of order " << a.rows() << " is not positive definite (jitter up to "
      << jitter / 2.0 << " attempted)";
  throw NotPositiveDefinite(msg.str(), jitter / 2.0);
}

Matrix SpdFactor::solve(const Matrix& b) const {
  if (b.rows() != order())
    throw DimensionError("right-hand side has " + std::to_string(b.rows()) +
                         " rows, matrix has order " + std::to_string(order()));
  if (order() == 0) return Matrix(0, b.cols());
  return llt_.solve(b);
}

Vector SpdFactor::solve(const Vector& b) const {
  if (b.size() != order())
    throw DimensionError("right-hand side has " + std::to_string(b.size()) +
                         " rows, matrix has order " + std::to_string(order()));
  if (order() == 0) return Vector(0);
  return llt_.solve(b);
}

Matrix SpdFactor::half_solve(const Matrix& b) const {
  if (b.rows() != order())
    throw DimensionError("right-hand side has " + std::to_string(b.rows()) +
                         " rows, matrix has order " + std::to_string(order()));
  if (order() == 0) return Matrix(0, b.cols());
  return llt_.matrixL().solve(b);
}

Matrix pd_solve(const Matrix& a, const Matrix& b) {
  return SpdFactor(a).solve(b);
}

Vector quadratic_diagonal(const SpdFactor& a, const Matrix& b) {
  if (b.rows() == 0) return Vector::Zero(b.cols());
  return a.half_solve(b).colwise().squaredNorm().transpose();
}

}  // namespace pargp
