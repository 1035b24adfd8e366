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

#include "pargp/icf_gp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pargp/errors.hpp"
#include "pargp/kernel.hpp"

namespace pargp {
namespace {

constexpr double kStopRatio = 1e-12;
constexpr double kBreakdownRatio = 1e-9;

void check_rank(std::size_t rank, std::size_t n) {
  if (rank == 0 || rank > n)
    throw std::invalid_argument("ICF rank " + std::to_string(rank) + " outside [1, " +
                                std::to_string(n) + "]");
}

void require_noise(const Hyperparameters& h, const char* what) {
  if (!(h.noise_variance > 0.0))
    throw std::invalid_argument(std::string(what) + " requires a positive noise variance");
}

[[noreturn]] void throw_breakdown(double residual, PointId id) {
  throw NumericalError("incomplete Cholesky breakdown: residual " + std::to_string(residual) +
                       " at point id " + std::to_string(id));
}

// Argmax residual over unpivoted columns, ties to the lowest id.
bool better(double res, PointId id, double best_res, PointId best_id) {
  return res > best_res || (res == best_res && id < best_id);
}

template <class KernelEntry>
IcfFactor pivoted_icf(std::span<const PointId> ids, std::size_t rank, double scale,
                      const std::vector<double>& diag, KernelEntry&& k_entry) {
  const std::size_t n = ids.size();
  check_rank(rank, n);
  IcfFactor out;
  out.f = Matrix::Zero(static_cast<Index>(rank), static_cast<Index>(n));
  std::vector<double> residual = diag;
  std::vector<bool> pivoted(n, false);

  for (std::size_t r = 0; r < rank; ++r) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (pivoted[j]) continue;
      if (best == n || better(residual[j], ids[j], residual[best], ids[best])) best = j;
    }
    if (best == n || residual[best] < kStopRatio * scale) break;

    const auto row = static_cast<Index>(r);
    const auto pcol = static_cast<Index>(best);
    const double pivot = std::sqrt(residual[best]);
    out.f(row, pcol) = pivot;
    pivoted[best] = true;
    residual[best] = 0.0;
    out.pivot_ids.push_back(ids[best]);
    out.pivot_columns.push_back(best);

    for (std::size_t j = 0; j < n; ++j) {
      if (pivoted[j]) continue;
      const auto col = static_cast<Index>(j);
      const double v = detail::icf_row_entry(k_entry(best, j), &out.f(0, pcol), &out.f(0, col),
                                             row, pivot);
      out.f(row, col) = v;
      residual[j] -= v * v;
      if (residual[j] < -kBreakdownRatio * scale) throw_breakdown(residual[j], ids[j]);
    }
  }
  out.effective_rank = out.pivot_ids.size();
  return out;
}

Vector prior_diagonal(std::span<const InputPoint> query, const Hyperparameters& h) {
  Vector d(static_cast<Index>(query.size()));
  for (std::size_t i = 0; i < query.size(); ++i) d(static_cast<Index>(i)) = kernel(query[i], query[i], h);
  return d;
}

}  // namespace

namespace detail {

[[gnu::noinline]] double icf_row_entry(double k_pj, const double* pivot_col, const double* col,
                                       Index r, double pivot) {
  double acc = k_pj;
  for (Index k = 0; k < r; ++k) acc -= pivot_col[k] * col[k];
  return acc / pivot;
}

IcfWorker::IcfWorker(const PointList& inputs, std::size_t rank, const Hyperparameters& h)
    : inputs_(inputs),
      h_(h),
      f_(Matrix::Zero(static_cast<Index>(rank), static_cast<Index>(inputs.size()))),
      residual_(inputs.size()),
      pivoted_(inputs.size(), false) {
  for (std::size_t j = 0; j < inputs.size(); ++j) residual_[j] = signal_kernel(inputs[j], inputs[j], h);
}

std::pair<double, PointId> IcfWorker::best_candidate() const {
  double best_res = -std::numeric_limits<double>::infinity();
  PointId best_id = std::numeric_limits<PointId>::max();
  bool found = false;
  for (std::size_t j = 0; j < inputs_.size(); ++j) {
    if (pivoted_[j]) continue;
    if (!found || better(residual_[j], inputs_[j].id, best_res, best_id)) {
      best_res = residual_[j];
      best_id = inputs_[j].id;
      found = true;
    }
  }
  return {best_res, best_id};
}

std::vector<double> IcfWorker::pivot_payload(PointId id) const {
  for (std::size_t j = 0; j < inputs_.size(); ++j) {
    if (inputs_[j].id != id) continue;
    std::vector<double> payload;
    payload.reserve(2 + inputs_[j].dim() + static_cast<std::size_t>(step_));
    payload.push_back(static_cast<double>(id));
    payload.push_back(residual_[j]);
    payload.insert(payload.end(), inputs_[j].coords.begin(), inputs_[j].coords.end());
    for (Index k = 0; k < step_; ++k) payload.push_back(f_(k, static_cast<Index>(j)));
    return payload;
  }
  throw std::logic_error("pivot id " + std::to_string(id) + " is not held by this machine");
}

void IcfWorker::apply_pivot(const std::vector<double>& payload) {
  const std::size_t d = h_.dim();
  if (payload.size() != 2 + d + static_cast<std::size_t>(step_))
    throw DimensionError("pivot row payload has " + std::to_string(payload.size()) + " scalars");
  if (step_ >= f_.rows()) throw std::logic_error("more pivots than the factor rank");

  InputPoint pivot_point;
  pivot_point.id = static_cast<PointId>(payload[0]);
  pivot_point.coords.assign(payload.begin() + 2, payload.begin() + 2 + static_cast<std::ptrdiff_t>(d));
  const double pivot = std::sqrt(payload[1]);
  const double* pivot_col = payload.data() + 2 + d;

  for (std::size_t j = 0; j < inputs_.size(); ++j) {
    if (inputs_[j].id == pivot_point.id) {
      f_(step_, static_cast<Index>(j)) = pivot;
      pivoted_[j] = true;
      residual_[j] = 0.0;
    }
  }
  const double scale = h_.signal_variance;
  for (std::size_t j = 0; j < inputs_.size(); ++j) {
    if (pivoted_[j]) continue;
    const auto col = static_cast<Index>(j);
    const double v = icf_row_entry(signal_kernel(pivot_point, inputs_[j], h_), pivot_col,
                                   &f_(0, col), step_, pivot);
    f_(step_, col) = v;
    residual_[j] -= v * v;
    if (residual_[j] < -kBreakdownRatio * scale) throw_breakdown(residual_[j], inputs_[j].id);
  }
  pivot_ids_.push_back(pivot_point.id);
  ++step_;
}

IcfFactorBlock IcfWorker::finish() const {
  return IcfFactorBlock{f_, pivot_ids_, pivot_ids_.size()};
}

void icf_worker_protocol(runtime::WorkerLink& link, IcfWorker& worker, std::size_t rank) {
  using runtime::MessageKind;
  for (std::size_t r = 0; r < rank; ++r) {
    const auto [res, id] = worker.best_candidate();
    link.send(MessageKind::kIcfPivotCandidate, {res, static_cast<double>(id)});
    const auto decision = link.receive(MessageKind::kControl).payload;
    if (decision.at(0) != 0.0) break;
    const auto winner = static_cast<int>(decision.at(1));
    if (winner == link.rank())
      link.send(MessageKind::kIcfPivotRow, worker.pivot_payload(static_cast<PointId>(decision.at(2))));
    worker.apply_pivot(link.receive(MessageKind::kIcfPivotRow).payload);
  }
}

std::vector<PointId> icf_master_protocol(runtime::Communicator& comm, std::size_t rank,
                                         double signal_variance) {
  using runtime::MessageKind;
  std::vector<PointId> pivots;
  for (std::size_t r = 0; r < rank; ++r) {
    const auto candidates = comm.reduce(MessageKind::kIcfPivotCandidate);
    int winner = -1;
    double best_res = -std::numeric_limits<double>::infinity();
    PointId best_id = std::numeric_limits<PointId>::max();
    for (std::size_t w = 0; w < candidates.size(); ++w) {
      const double res = candidates[w].payload.at(0);
      const auto id = static_cast<PointId>(candidates[w].payload.at(1));
      if (res == -std::numeric_limits<double>::infinity()) continue;
      if (winner < 0 || better(res, id, best_res, best_id)) {
        winner = static_cast<int>(w);
        best_res = res;
        best_id = id;
      }
    }
    const bool stop = winner < 0 || best_res < kStopRatio * signal_variance;
    for (int w = 0; w < comm.workers(); ++w)
      comm.send_control(w, stop ? std::vector<double>{1.0}
                                : std::vector<double>{0.0, static_cast<double>(winner),
                                                      static_cast<double>(best_id)});
    if (stop) break;
    const auto row = comm.receive(winner, MessageKind::kIcfPivotRow);
    comm.broadcast(MessageKind::kIcfPivotRow, row.payload);
    pivots.push_back(best_id);
  }
  return pivots;
}

}  // namespace detail

IcfFactor icf_factor_matrix(const Matrix& k, std::span<const PointId> ids, std::size_t rank,
                            double scale) {
  if (k.rows() != k.cols() || static_cast<std::size_t>(k.rows()) != ids.size())
    throw DimensionError("ICF matrix must be square with one id per column");
  std::vector<double> diag(ids.size());
  for (std::size_t j = 0; j < ids.size(); ++j) diag[j] = k(static_cast<Index>(j), static_cast<Index>(j));
  return pivoted_icf(ids, rank, scale, diag, [&](std::size_t p, std::size_t j) {
    return k(static_cast<Index>(p), static_cast<Index>(j));
  });
}

IcfFactor icf_factor_serial(std::span<const InputPoint> train_inputs, std::size_t rank,
                            const Hyperparameters& h) {
  h.validate();
  require_noise(h, "ICF factorization");
  check_dimensions(train_inputs, h);
  std::vector<PointId> ids(train_inputs.size());
  std::vector<double> diag(train_inputs.size());
  for (std::size_t j = 0; j < train_inputs.size(); ++j) {
    ids[j] = train_inputs[j].id;
    diag[j] = signal_kernel(train_inputs[j], train_inputs[j], h);
  }
  return pivoted_icf(ids, rank, h.signal_variance, diag, [&](std::size_t p, std::size_t j) {
    return signal_kernel(train_inputs[p], train_inputs[j], h);
  });
}

std::vector<IcfFactorBlock> icf_factor_distributed(const Partition& partition, std::size_t rank,
                                                   const Hyperparameters& h,
                                                   runtime::Transport& transport,
                                                   runtime::Ledger& ledger) {
  using runtime::MessageKind;
  h.validate();
  require_noise(h, "ICF factorization");
  std::size_t n = 0;
  for (const auto& b : partition.blocks) {
    check_dimensions(b.data.inputs, h);
    n += b.data.size();
  }
  check_rank(rank, n);
  const int machines = static_cast<int>(partition.machines());

  std::vector<IcfFactorBlock> blocks;
  transport.execute(
      machines,
      [&](runtime::WorkerLink& link) {
        const auto& inputs = partition.blocks[static_cast<std::size_t>(link.rank())].data.inputs;
        detail::IcfWorker worker(inputs, rank, h);
        detail::icf_worker_protocol(link, worker, rank);
        const Matrix& f = worker.finish().entries;
        link.send(MessageKind::kIcfFactorBlock, std::vector<double>(f.data(), f.data() + f.size()));
      },
      [&](runtime::MasterLink& link) {
        runtime::Communicator comm(link, ledger);
        const auto pivots = detail::icf_master_protocol(comm, rank, h.signal_variance);
        const auto msgs = comm.gather(MessageKind::kIcfFactorBlock);
        blocks.resize(msgs.size());
        for (std::size_t m = 0; m < msgs.size(); ++m) {
          const auto cols = static_cast<Index>(partition.blocks[m].data.size());
          if (msgs[m].payload.size() != rank * static_cast<std::size_t>(cols))
            throw DimensionError("factor block of machine " + std::to_string(m) + " has wrong size");
          blocks[m].entries = Eigen::Map<const Matrix>(msgs[m].payload.data(),
                                                        static_cast<Index>(rank), cols);
          blocks[m].pivot_ids = pivots;
          blocks[m].effective_rank = pivots.size();
        }
      });
  return blocks;
}

IcfFactor stack_factor_blocks(std::span<const IcfFactorBlock> blocks, const Partition& partition) {
  if (blocks.size() != partition.machines())
    throw DimensionError("factor block count does not match the partition");
  std::size_t n = 0;
  for (const auto& b : partition.blocks) n += b.data.size();
  const Index rank = blocks.empty() ? 0 : blocks.front().entries.rows();
  IcfFactor out;
  out.f = Matrix::Zero(rank, static_cast<Index>(n));
  for (std::size_t m = 0; m < blocks.size(); ++m) {
    const auto& idx = partition.blocks[m].source_index;
    if (blocks[m].entries.rows() != rank || blocks[m].block_cols() != idx.size())
      throw DimensionError("factor block " + std::to_string(m) + " has inconsistent shape");
    for (std::size_t k = 0; k < idx.size(); ++k)
      out.f.col(static_cast<Index>(idx[k])) = blocks[m].entries.col(static_cast<Index>(k));
  }
  if (!blocks.empty()) {
    out.pivot_ids = blocks.front().pivot_ids;
    out.effective_rank = blocks.front().effective_rank;
    for (PointId id : out.pivot_ids) {
      for (std::size_t m = 0; m < blocks.size(); ++m)
        for (std::size_t k = 0; k < partition.blocks[m].data.size(); ++k)
          if (partition.blocks[m].data.inputs[k].id == id)
            out.pivot_columns.push_back(partition.blocks[m].source_index[k]);
    }
  }
  return out;
}

IcfLocalSummary icf_local_summary(const Dataset& block, const Matrix& f_m,
                                  std::span<const InputPoint> query, const Hyperparameters& h) {
  if (static_cast<std::size_t>(f_m.cols()) != block.size())
    throw DimensionError("factor block has " + std::to_string(f_m.cols()) + " columns but the block holds " +
                         std::to_string(block.size()) + " points");
  IcfLocalSummary out;
  out.y_dot = f_m * block.residuals();
  out.sigma_dot = f_m * cov_matrix(block.inputs, query, h);
  out.phi = f_m * f_m.transpose();
  return out;
}

Matrix icf_phi_total(std::span<const Matrix> phis, const Hyperparameters& h) {
  require_noise(h, "pICF global summary");
  if (phis.empty()) throw std::invalid_argument("no local summaries");
  const Index r = phis.front().rows();
  Matrix sum = Matrix::Zero(r, r);
  for (const auto& phi : phis) {
    if (phi.rows() != r || phi.cols() != r) throw DimensionError("local summaries disagree on the rank");
    sum += phi;
  }
  Matrix total = sum / h.noise_variance;
  total.diagonal().array() += 1.0;
  return total;
}

namespace {

SpdFactor factor_phi_total(const Matrix& phi_total) {
  SpdFactor f(symmetrize(phi_total));
  if (f.jitter() != 0.0) throw NumericalError("I + sigma_n^-2 sum Phi_m was not positive definite");
  return f;
}

void check_locals(std::span<const IcfLocalSummary> locals) {
  if (locals.empty()) throw std::invalid_argument("no local summaries");
  const Index r = locals.front().y_dot.size();
  const Index u = locals.front().sigma_dot.cols();
  for (const auto& l : locals)
    if (l.y_dot.size() != r || l.sigma_dot.rows() != r || l.sigma_dot.cols() != u ||
        l.phi.rows() != r || l.phi.cols() != r)
      throw DimensionError("local summaries disagree on rank or query size");
}

std::vector<Matrix> phis_of(std::span<const IcfLocalSummary> locals) {
  std::vector<Matrix> phis;
  phis.reserve(locals.size());
  for (const auto& l : locals) phis.push_back(l.phi);
  return phis;
}

Vector sum_y_dot(std::span<const IcfLocalSummary> locals) {
  Vector sum = Vector::Zero(locals.front().y_dot.size());
  for (const auto& l : locals) sum += l.y_dot;
  return sum;
}

}  // namespace

IcfGlobalSummary icf_global_summary(std::span<const IcfLocalSummary> locals,
                                    const Hyperparameters& h) {
  check_locals(locals);
  IcfGlobalSummary out;
  out.phi_total = icf_phi_total(phis_of(locals), h);
  const SpdFactor phi = factor_phi_total(out.phi_total);
  Matrix sigma_sum = Matrix::Zero(locals.front().sigma_dot.rows(), locals.front().sigma_dot.cols());
  for (const auto& l : locals) sigma_sum += l.sigma_dot;
  out.y_ddot = phi.solve(sum_y_dot(locals));
  out.sigma_ddot = phi.solve(sigma_sum);
  return out;
}

Matrix icf_global_slice(const SpdFactor& phi_total, std::span<const Matrix> slices) {
  if (slices.empty()) throw std::invalid_argument("no summary slices");
  Matrix sum = Matrix::Zero(slices.front().rows(), slices.front().cols());
  for (const auto& s : slices) {
    if (s.rows() != sum.rows() || s.cols() != sum.cols()) throw DimensionError("summary slices are misaligned");
    sum += s;
  }
  return phi_total.solve(sum);
}

std::vector<Index> contiguous_slices(std::size_t query_size, std::size_t machines) {
  if (machines == 0) throw std::invalid_argument("machine count must be at least 1");
  std::vector<Index> sizes(machines);
  for (std::size_t i = 0; i < machines; ++i)
    sizes[i] = static_cast<Index>(query_size / machines + (i < query_size % machines ? 1 : 0));
  return sizes;
}

IcfGlobalSummary icf_global_summary_partitioned(std::span<const IcfLocalSummary> locals,
                                                std::span<const Index> slice_sizes,
                                                const Hyperparameters& h) {
  check_locals(locals);
  const Index u = locals.front().sigma_dot.cols();
  Index total = 0;
  for (Index s : slice_sizes) total += s;
  if (total != u)
    throw DimensionError("query slices cover " + std::to_string(total) + " of " +
                         std::to_string(u) + " query points");

  IcfGlobalSummary out;
  out.phi_total = icf_phi_total(phis_of(locals), h);
  const SpdFactor phi = factor_phi_total(out.phi_total);
  out.y_ddot = phi.solve(sum_y_dot(locals));
  out.sigma_ddot.resize(locals.front().sigma_dot.rows(), u);
  Index offset = 0;
  for (Index size : slice_sizes) {
    std::vector<Matrix> pieces;
    pieces.reserve(locals.size());
    for (const auto& l : locals) pieces.push_back(l.sigma_dot.middleCols(offset, size));
    out.sigma_ddot.middleCols(offset, size) = icf_global_slice(phi, pieces);
    offset += size;
  }
  return out;
}

IcfPredictiveComponent icf_predictive_component(const Dataset& block, const IcfLocalSummary& local,
                                                const IcfGlobalSummary& global,
                                                std::span<const InputPoint> query,
                                                const Hyperparameters& h, bool want_full_cov) {
  require_noise(h, "pICF predictive component");
  const auto u = static_cast<Index>(query.size());
  if (local.sigma_dot.cols() != u || global.sigma_ddot.cols() != u ||
      local.sigma_dot.rows() != global.sigma_ddot.rows() || global.y_ddot.size() != local.sigma_dot.rows())
    throw DimensionError("predictive component shapes disagree with the query set");

  const double inv = 1.0 / h.noise_variance;
  const double inv2 = inv * inv;
  const Matrix k_du = cov_matrix(block.inputs, query, h);

  IcfPredictiveComponent out;
  out.mean_part = inv * (k_du.transpose() * block.residuals()) -
                  inv2 * (local.sigma_dot.transpose() * global.y_ddot);
  if (want_full_cov) {
    Matrix part = inv * (k_du.transpose() * k_du) - inv2 * (local.sigma_dot.transpose() * global.sigma_ddot);
    out.cov_diagonal = part.diagonal();
    out.cov_part = std::move(part);
  } else {
    out.cov_diagonal = inv * k_du.colwise().squaredNorm().transpose() -
                       inv2 * local.sigma_dot.cwiseProduct(global.sigma_ddot).colwise().sum().transpose();
  }
  return out;
}

PredictiveDistribution picf_predict(std::span<const IcfPredictiveComponent> components,
                                    std::span<const InputPoint> query, const Hyperparameters& h,
                                    double prior_mean, bool want_full_cov) {
  const auto u = static_cast<Index>(query.size());
  Vector mean_sum = Vector::Zero(u);
  Vector diag_sum = Vector::Zero(u);
  Matrix cov_sum;
  if (want_full_cov) cov_sum = Matrix::Zero(u, u);
  for (std::size_t m = 0; m < components.size(); ++m) {
    const auto& c = components[m];
    if (c.mean_part.size() != u || c.cov_diagonal.size() != u)
      throw DimensionError("predictive component " + std::to_string(m) + " has the wrong size");
    mean_sum += c.mean_part;
    diag_sum += c.cov_diagonal;
    if (want_full_cov) {
      if (!c.cov_part) throw std::invalid_argument("full covariance requested but component lacks it");
      cov_sum += *c.cov_part;
    }
  }
  PredictiveDistribution out;
  out.mean = mean_sum.array() + prior_mean;
  if (want_full_cov) {
    Matrix cov = cov_matrix(query, h) - cov_sum;
    out.variances = cov.diagonal();
    out.covariance = std::move(cov);
  } else {
    out.variances = prior_diagonal(query, h) - diag_sum;
  }
  return out;
}

PredictiveDistribution centralized_icf(const Dataset& train, const Matrix& f,
                                       std::span<const InputPoint> query,
                                       const Hyperparameters& h, bool want_full_cov) {
  h.validate();
  require_noise(h, "centralized ICF");
  if (static_cast<std::size_t>(f.cols()) != train.size())
    throw DimensionError("factor has " + std::to_string(f.cols()) + " columns for " +
                         std::to_string(train.size()) + " training points");
  Matrix a = f.transpose() * f;
  a.diagonal().array() += h.noise_variance;
  const SpdFactor factor(symmetrize(a));
  const Matrix k_du = cov_matrix(train.inputs, query, h);

  PredictiveDistribution out;
  out.mean = (k_du.transpose() * factor.solve(train.residuals())).array() + train.prior_mean;
  const Matrix half = factor.half_solve(k_du);
  if (want_full_cov) {
    Matrix cov = cov_matrix(query, h);
    cov.noalias() -= half.transpose() * half;
    out.variances = cov.diagonal();
    out.covariance = std::move(cov);
  } else {
    out.variances = prior_diagonal(query, h) - half.colwise().squaredNorm().transpose();
  }
  return out;
}

}  // namespace pargp
