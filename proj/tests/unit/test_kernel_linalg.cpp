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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pargp/errors.hpp"
#include "pargp/kernel.hpp"
#include "pargp/linalg.hpp"

using namespace pargp;

namespace {

InputPoint pt(std::vector<double> c, PointId id) { return InputPoint{std::move(c), id}; }

Matrix random_spd(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = z(rng);
  Matrix spd = a * a.transpose();
  spd.diagonal().array() += static_cast<double>(n);
  return spd;
}

}  // namespace

TEST_CASE("kernel: same id adds the noise variance") {
  const auto h = oracle::hyper(1, 1.0, 0.25, 1.0);
  const auto x = pt({0.3}, 7);
  CHECK(kernel(x, x, h) == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("kernel: closed form for distinct ids") {
  const auto h = oracle::hyper(1, 1.0, 0.25, 1.0);
  CHECK(kernel(pt({0.0}, 1), pt({1.0}, 2), h) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(std::abs(kernel(pt({0.0}, 1), pt({1.0}, 2), h) - 0.606531) < 1e-6);
}

TEST_CASE("kernel: equal coordinates with different ids get no noise") {
  const auto h = oracle::hyper(2, 2.0, 0.5, 1.0);
  CHECK(kernel(pt({1.0, 2.0}, 1), pt({1.0, 2.0}, 2), h) == 2.0);
  CHECK(kernel(pt({1.0, 2.0}, 1), pt({1.0, 2.0}, 1), h) == 2.5);
}

TEST_CASE("kernel: symmetric and matches the written-out formula") {
  std::mt19937_64 rng(11);
  Hyperparameters h;
  h.signal_variance = 1.7;
  h.noise_variance = 0.3;
  h.length_scales = {0.5, 2.0, 1.3};
  const auto pts = oracle::random_points(40, 3, rng, 0);
  for (const auto& a : pts)
    for (const auto& b : pts) {
      CHECK(kernel(a, b, h) == kernel(b, a, h));
      CHECK(std::abs(kernel(a, b, h) - oracle::k(a, b, h)) <= 1e-14);
    }
}

TEST_CASE("kernel: dimension mismatch names both dimensions") {
  const auto h = oracle::hyper(2, 1.0, 0.0, 1.0);
  try {
    (void)kernel(pt({1.0}, 0), pt({1.0, 2.0}, 1), h);
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    const std::string what = e.what();
    CHECK(what.find('1') != std::string::npos);
    CHECK(what.find('2') != std::string::npos);
  }
  CHECK_THROWS_AS(cov_matrix(PointList{pt({1.0}, 0)}, PointList{pt({1.0}, 1)}, h), DimensionError);
}

TEST_CASE("cov_matrix: shapes and symmetry") {
  const auto h = oracle::hyper(1, 1.0, 0.25, 1.0);
  const PointList one{pt({0.0}, 0)};
  const Matrix a = cov_matrix(one, one, h);
  CHECK(a.rows() == 1);
  CHECK(a(0, 0) == 1.25);
  const Matrix e = cov_matrix(one, PointList{}, h);
  CHECK(e.rows() == 1);
  CHECK(e.cols() == 0);

  std::mt19937_64 rng(3);
  const auto pts = oracle::random_points(25, 1, rng, 0);
  const Matrix s = cov_matrix(pts, h);
  CHECK(s == s.transpose());
  CHECK(oracle::max_abs_diff(s, cov_matrix(pts, pts, h)) == 0.0);
}

TEST_CASE("cov_matrix: positive definite with noise for distinct points") {
  std::mt19937_64 rng(5);
  const auto h = oracle::hyper(2, 1.0, 0.01, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = oracle::random_points(3, 2, rng, 0);
    Eigen::LLT<Matrix> llt(cov_matrix(pts, h));
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("pd_solve: identity and scaled identity") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  Matrix b(3, 4);
  for (Index i = 0; i < b.size(); ++i) b.data()[i] = z(rng);
  CHECK(oracle::max_abs_diff(pd_solve(Matrix::Identity(3, 3), b), b) == 0.0);
  const Matrix x = pd_solve(2.0 * Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK(oracle::max_abs_diff(x, 0.5 * Matrix::Identity(2, 2)) <= 1e-15);
}

TEST_CASE("pd_solve: relative residual over random SPD systems of order 1..64") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  for (Index n = 1; n <= 64; ++n) {
    const Matrix a = random_spd(n, rng);
    Matrix b(n, 3);
    for (Index i = 0; i < b.size(); ++i) b.data()[i] = z(rng);
    const Matrix x = pd_solve(a, b);
    const double rel = (a * x - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
    CHECK(rel <= 1e-10);
  }
}

TEST_CASE("pd_solve: rejects shape and symmetry violations") {
  CHECK_THROWS_AS(pd_solve(Matrix::Identity(3, 2), Matrix::Identity(3, 1)), DimensionError);
  CHECK_THROWS_AS(pd_solve(Matrix::Identity(3, 3), Matrix::Identity(2, 2)), DimensionError);
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = 0.5;
  CHECK_THROWS(pd_solve(a, Matrix::Identity(2, 2)));
}

TEST_CASE("pd_solve: jitter rescues a singular PSD matrix") {
  // Rank-one PSD matrix: plain Cholesky fails, a tiny diagonal shift succeeds.
  Vector v(3);
  v << 1.0, 2.0, 3.0;
  const Matrix a = v * v.transpose();
  const SpdFactor f(a);
  CHECK(f.jitter() > 0.0);
  CHECK(f.jitter() <= SpdFactor::kJitterScale * a.diagonal().mean() * 32.0);
}

TEST_CASE("pd_solve: indefinite input reports the attempted jitter") {
  Matrix a = Matrix::Identity(2, 2);
  a(1, 1) = -1.0;
  try {
    (void)pd_solve(a, Matrix::Identity(2, 2));
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.jitter() > 0.0);
    CHECK(std::string(e.what()).find("not positive definite") != std::string::npos);
  }
}

TEST_CASE("quadratic_diagonal equals the diagonal of B^T A^{-1} B") {
  std::mt19937_64 rng(9);
  const Matrix a = random_spd(6, rng);
  std::normal_distribution<double> z;
  Matrix b(6, 4);
  for (Index i = 0; i < b.size(); ++i) b.data()[i] = z(rng);
  const Vector d = quadratic_diagonal(SpdFactor(a), b);
  const Matrix full = b.transpose() * oracle::inv(a) * b;
  CHECK(oracle::max_abs_diff(d, Vector(full.diagonal())) <= 1e-12);
}

TEST_CASE("hyperparameter validation") {
  auto h = oracle::hyper(1, 1.0, 0.0, 1.0);
  CHECK_NOTHROW(h.validate());
  h.signal_variance = 0.0;
  CHECK_THROWS(h.validate());
  h = oracle::hyper(1, 1.0, -0.1, 1.0);
  CHECK_THROWS(h.validate());
  h = oracle::hyper(1, 1.0, 0.1, 0.0);
  CHECK_THROWS(h.validate());
}
