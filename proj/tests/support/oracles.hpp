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

// Reference implementations used only by the tests. They follow the textbook
// formulas literally (explicit inverses, dense matrices, no shared helpers
// from the library) so that agreement is meaningful.

#include <cstdint>
#include <random>
#include <vector>

#include "pargp/partitioning.hpp"
#include "pargp/types.hpp"

namespace oracle {

using pargp::Dataset;
using pargp::Hyperparameters;
using pargp::InputPoint;
using pargp::Matrix;
using pargp::PointList;
using pargp::Vector;

struct Dense {
  Vector mean;
  Matrix cov;
};

/// Points uniform in [0, 10]^d with ids first_id, first_id + 1, ...
PointList random_points(std::size_t n, std::size_t d, std::mt19937_64& rng, std::int64_t first_id);

/// Random points with outputs N(0, 1) around `prior_mean`.
Dataset random_dataset(std::size_t n, std::size_t d, std::mt19937_64& rng, std::int64_t first_id,
                       double prior_mean = 0.0);

Hyperparameters hyper(std::size_t d, double signal, double noise, double length);

/// Squared exponential written out, delta by id.
double k(const InputPoint& a, const InputPoint& b, const Hyperparameters& h);
Matrix k(const PointList& a, const PointList& b, const Hyperparameters& h);

/// Inverse via full-pivot LU.
Matrix inv(const Matrix& a);

Dense fgp(const Dataset& train, const PointList& query, const Hyperparameters& h);

/// Dense PITC over explicit training blocks, query in the given order.
Dense pitc(const std::vector<Dataset>& blocks, const PointList& query, const PointList& support,
           const Hyperparameters& h, double prior_mean);

/// Dense PIC: query_blocks[m] pairs with blocks[m]. Output is the query
/// blocks concatenated in order.
Dense pic(const std::vector<Dataset>& blocks, const std::vector<PointList>& query_blocks,
          const PointList& support, const Hyperparameters& h, double prior_mean);

/// mu + K_UD (F^T F + s^2 I)^{-1} r, Sigma_UU - K_UD (F^T F + s^2 I)^{-1} K_DU.
Dense icf(const Dataset& train, const Matrix& f, const PointList& query, const Hyperparameters& h);

/// Textbook pivoted incomplete Cholesky of k (max diagonal, ties to lowest
/// index), R rows; stops when the largest residual drops below `stop`.
Matrix pivoted_cholesky(const Matrix& kmat, std::size_t rank, double stop);

/// Greedy selection recomputing every posterior variance from scratch.
std::vector<std::size_t> greedy_support(const PointList& candidates, std::size_t k,
                                        const Hyperparameters& h);

std::vector<Dataset> blocks_of(const pargp::Partition& p);
std::vector<PointList> query_blocks_of(const pargp::Partition& p);

/// Rows of a stacked-query result put back into original query order.
Vector unstack(const Vector& stacked, const pargp::Partition& p, std::size_t query_size);

double max_abs_diff(const Vector& a, const Vector& b);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace oracle
