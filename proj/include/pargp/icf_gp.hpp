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

#include <optional>
#include <span>
#include <vector>

#include "pargp/linalg.hpp"
#include "pargp/partitioning.hpp"
#include "pargp/runtime/ledger.hpp"
#include "pargp/runtime/transport.hpp"
#include "pargp/types.hpp"

namespace pargp {

/// Rank-R pivoted incomplete Cholesky factor F of the noise-free kernel
/// matrix K = Sigma_DD - sigma_n^2 I, so that Sigma_DD ~ F^T F + sigma_n^2 I.
///
/// Columns follow the input order. Pivot r is the column with the largest
/// diagonal residual (ties to the lowest id); row r is zero on every earlier
/// pivot column, which makes F upper triangular under the pivot ordering.
/// If the largest residual drops below 1e-12 * sigma_s^2 the remaining rows
/// stay zero and effective_rank records how many were produced.
struct IcfFactor {
  Matrix f;
  std::vector<PointId> pivot_ids;
  std::vector<std::size_t> pivot_columns;
  std::size_t effective_rank = 0;

  std::size_t rank() const noexcept { return static_cast<std::size_t>(f.rows()); }
};

/// Machine m's columns F_m of the factor, plus the shared pivot metadata.
struct IcfFactorBlock {
  Matrix entries;  // R x |D_m|
  std::vector<PointId> pivot_ids;
  std::size_t effective_rank = 0;

  std::size_t rank() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  std::size_t block_cols() const noexcept { return static_cast<std::size_t>(entries.cols()); }
};

struct IcfLocalSummary {
  Vector y_dot;      // F_m (y_{D_m} - mu_{D_m}), R
  Matrix sigma_dot;  // F_m Sigma_{D_m U}, R x |U|
  Matrix phi;        // F_m F_m^T, R x R
};

struct IcfGlobalSummary {
  Vector y_ddot;     // Phi^{-1} sum_m y_dot_m
  Matrix sigma_ddot; // Phi^{-1} sum_m sigma_dot_m
  Matrix phi_total;  // I + sigma_n^{-2} sum_m Phi_m
};

/// Machine m's additive share of the pICF predictive distribution.
struct IcfPredictiveComponent {
  Vector mean_part;
  Vector cov_diagonal;
  std::optional<Matrix> cov_part;
};

IcfFactor icf_factor_serial(std::span<const InputPoint> train_inputs, std::size_t rank,
                            const Hyperparameters& h);

/// The same pivoted factorization on an explicit PSD matrix; `scale` sets the
/// stopping and breakdown thresholds (1e-12 * scale, -1e-9 * scale).
IcfFactor icf_factor_matrix(const Matrix& k, std::span<const PointId> ids, std::size_t rank,
                            double scale);

/// Distributed factorization over `transport`. Each pivot costs one
/// max-reduction of per-machine candidates and one broadcast of the pivot
/// row; the factor blocks are gathered to the caller at the end. Output is
/// bitwise identical to icf_factor_serial on the stacked columns.
std::vector<IcfFactorBlock> icf_factor_distributed(const Partition& partition, std::size_t rank,
                                                   const Hyperparameters& h,
                                                   runtime::Transport& transport,
                                                   runtime::Ledger& ledger);

/// Reassembles distributed blocks into a factor over the original training order.
IcfFactor stack_factor_blocks(std::span<const IcfFactorBlock> blocks, const Partition& partition);

IcfLocalSummary icf_local_summary(const Dataset& block, const Matrix& f_m,
                                  std::span<const InputPoint> query, const Hyperparameters& h);

IcfGlobalSummary icf_global_summary(std::span<const IcfLocalSummary> locals,
                                    const Hyperparameters& h);

/// Phi = I + sigma_n^{-2} sum_m Phi_m, summed in ascending machine order.
Matrix icf_phi_total(std::span<const Matrix> phis, const Hyperparameters& h);

/// One query slice of the global summary: Phi^{-1} sum_m sigma_dot_m^i.
Matrix icf_global_slice(const SpdFactor& phi_total, std::span<const Matrix> slices);

/// Global summary with the sigma_ddot solve split over contiguous query
/// slices of the given sizes, then concatenated.
IcfGlobalSummary icf_global_summary_partitioned(std::span<const IcfLocalSummary> locals,
                                                std::span<const Index> slice_sizes,
                                                const Hyperparameters& h);

/// Sizes of M contiguous query slices (first |U| mod M get one extra).
std::vector<Index> contiguous_slices(std::size_t query_size, std::size_t machines);

IcfPredictiveComponent icf_predictive_component(const Dataset& block, const IcfLocalSummary& local,
                                                const IcfGlobalSummary& global,
                                                std::span<const InputPoint> query,
                                                const Hyperparameters& h,
                                                bool want_full_cov = false);

/// Master assembly. Variances are reported raw; they can be negative.
PredictiveDistribution picf_predict(std::span<const IcfPredictiveComponent> components,
                                    std::span<const InputPoint> query, const Hyperparameters& h,
                                    double prior_mean, bool want_full_cov = false);

/// Dense reference: solves (F^T F + sigma_n^2 I) directly. F's columns follow train order.
PredictiveDistribution centralized_icf(const Dataset& train, const Matrix& f,
                                       std::span<const InputPoint> query,
                                       const Hyperparameters& h, bool want_full_cov = false);

namespace detail {

/// Entry of ICF row r at column j: (k_pj - <F_{0:r,p}, F_{0:r,j}>) / pivot.
/// Serial and distributed factorizations both go through here so that they
/// round identically.
double icf_row_entry(double k_pj, const double* pivot_col, const double* col, Index r,
                     double pivot);

/// Worker-side state of the distributed factorization for one block.
class IcfWorker {
 public:
  IcfWorker(const PointList& inputs, std::size_t rank, const Hyperparameters& h);

  /// Largest residual among unpivoted local columns as (residual, id); the
  /// residual is -inf when nothing is left.
  std::pair<double, PointId> best_candidate() const;

  /// Pivot row payload for local column with this id: id, residual, coords, F(0:r, p).
  std::vector<double> pivot_payload(PointId id) const;

  /// Applies a broadcast pivot row as row `step_` of the factor.
  void apply_pivot(const std::vector<double>& payload);

  IcfFactorBlock finish() const;
  std::size_t steps() const noexcept { return static_cast<std::size_t>(step_); }

 private:
  const PointList& inputs_;
  const Hyperparameters& h_;
  Matrix f_;
  std::vector<double> residual_;
  std::vector<bool> pivoted_;
  std::vector<PointId> pivot_ids_;
  Index step_ = 0;
};

/// Worker side of the pivot protocol: per step, offer a candidate, await the
/// decision, ship the pivot row if this machine won, apply the broadcast row.
void icf_worker_protocol(runtime::WorkerLink& link, IcfWorker& worker, std::size_t rank);

/// Master side: reduce candidates, announce the winner, relay its row as a
/// broadcast. Returns the pivot ids in order.
std::vector<PointId> icf_master_protocol(runtime::Communicator& comm, std::size_t rank,
                                         double signal_variance);

}  // namespace detail

}  // namespace pargp
