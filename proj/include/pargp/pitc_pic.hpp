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
#include <vector>

#include "pargp/linalg.hpp"
#include "pargp/partitioning.hpp"
#include "pargp/types.hpp"

namespace pargp {

/// A common support set S with its prior covariance Sigma_SS factored once.
///
/// Outputs at S are never observed, so there is deliberately no output field.
class SupportSet {
 public:
  SupportSet(PointList points, const Hyperparameters& h);

  const PointList& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Matrix& cov() const noexcept { return cov_; }
  const SpdFactor& factor() const noexcept { return factor_; }
  const Hyperparameters& hyperparameters() const noexcept { return h_; }

  /// Throws std::invalid_argument if `h` differs from the hyperparameters S was built with.
  void check_compatible(const Hyperparameters& h) const;

 private:
  PointList points_;
  Hyperparameters h_;
  Matrix cov_;
  SpdFactor factor_;
};

/// Machine-local compression of (D_m, y_{D_m}) against S.
struct PitcLocalSummary {
  Vector y_dot;       // Sigma_{S D_m} Sigma_{D_m D_m|S}^{-1} (y_{D_m} - mu_{D_m})
  Matrix sigma_dot;   // Sigma_{S D_m} Sigma_{D_m D_m|S}^{-1} Sigma_{D_m S}
};

/// Sum of local summaries, seeded with Sigma_SS for the covariance part.
struct PitcGlobalSummary {
  Vector y_ddot;
  Matrix sigma_ddot;
};

/// Sigma_{D_m D_m|S}, symmetrized.
Matrix conditional_cov(std::span<const InputPoint> block, const SupportSet& s,
                       const Hyperparameters& h);

/// Local summary of one block. An empty block contributes a zero summary.
PitcLocalSummary local_summary(const Dataset& block, const SupportSet& s, const Hyperparameters& h);

/// Fixed ascending-index reduction of the local summaries.
PitcGlobalSummary global_summary(std::span<const PitcLocalSummary> locals, const SupportSet& s,
                                 const Hyperparameters& h);

PredictiveDistribution ppitc_predict_block(std::span<const InputPoint> query_block,
                                           const SupportSet& s, const PitcGlobalSummary& global,
                                           const Hyperparameters& h, double prior_mean,
                                           bool want_full_cov = false);

/// pPIC prediction for one machine: the global-summary term corrected with
/// the machine's own data (D_m, y_{D_m}).
PredictiveDistribution ppic_predict_block(const Dataset& block,
                                          std::span<const InputPoint> query_block,
                                          const SupportSet& s, const PitcLocalSummary& local,
                                          const PitcGlobalSummary& global,
                                          const Hyperparameters& h, bool want_full_cov = false);

/// Dense PITC with Lambda the block diagonal of Sigma_{DD|S} along the
/// partition's training blocks. Output follows `query` order.
PredictiveDistribution centralized_pitc(const Dataset& train, const Partition& partition,
                                        std::span<const InputPoint> query, const SupportSet& s,
                                        const Hyperparameters& h, bool want_full_cov = false);

/// Dense PIC: like PITC, but each query block keeps its exact covariance with
/// the paired training block. Output follows `query` order.
PredictiveDistribution centralized_pic(const Dataset& train, const Partition& partition,
                                       std::span<const InputPoint> query, const SupportSet& s,
                                       const Hyperparameters& h, bool want_full_cov = false);

namespace detail {

/// centralized_pic with the diagonal Sigma_{U_m D_m} blocks optionally
/// replaced by their low-rank counterparts (which reduces it to PITC).
PredictiveDistribution centralized_pic(const Dataset& train, const Partition& partition,
                                       std::span<const InputPoint> query, const SupportSet& s,
                                       const Hyperparameters& h, bool want_full_cov,
                                       bool keep_local_blocks);

/// Writes block rows of `part` into `out` at `index` positions.
void scatter_rows(const PredictiveDistribution& part, std::span<const std::size_t> index,
                  PredictiveDistribution& out);

}  // namespace detail

}  // namespace pargp
