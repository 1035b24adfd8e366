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

#include "pargp/runtime/runtime.hpp"

#include <string>

#include "pargp/errors.hpp"
#include "pargp/icf_gp.hpp"
#include "pargp/kernel.hpp"

namespace pargp::runtime {
namespace {

void append(std::vector<double>& out, const Matrix& m) {
  out.insert(out.end(), m.data(), m.data() + m.size());
}

void append(std::vector<double>& out, const Vector& v) {
  out.insert(out.end(), v.data(), v.data() + v.size());
}

/// Sequential reader over a message payload.
class Unpacker {
 public:
  explicit Unpacker(const Message& m) : data_(m.payload), what_(kind_name(m.kind)) {}

  Vector vector(Index n) {
    take(n);
    Vector v = Eigen::Map<const Vector>(data_.data() + pos_, n);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  Matrix matrix(Index rows, Index cols) {
    take(rows * cols);
    Matrix m = Eigen::Map<const Matrix>(data_.data() + pos_, rows, cols);
    pos_ += static_cast<std::size_t>(rows * cols);
    return m;
  }

  void done() const {
    if (pos_ != data_.size())
      throw DimensionError(std::string(what_) + " payload has " + std::to_string(data_.size() - pos_) +
                           " unexpected trailing scalars");
  }

 private:
  void take(Index n) const {
    if (n < 0 || pos_ + static_cast<std::size_t>(n) > data_.size())
      throw DimensionError(std::string(what_) + " payload is too short");
  }

  const std::vector<double>& data_;
  std::string_view what_;
  std::size_t pos_ = 0;
};

std::vector<double> pack_prediction(const PredictiveDistribution& p) {
  std::vector<double> out;
  append(out, p.mean);
  append(out, p.variances);
  if (p.covariance) append(out, *p.covariance);
  return out;
}

PredictiveDistribution unpack_prediction(const Message& m, Index n, bool full) {
  Unpacker in(m);
  PredictiveDistribution p;
  p.mean = in.vector(n);
  p.variances = in.vector(n);
  if (full) p.covariance = in.matrix(n, n);
  in.done();
  return p;
}

void check_machines(std::size_t machines) {
  if (machines == 0) throw std::invalid_argument("machine count must be at least 1");
}

Index sum_sizes(const Partition& p) {
  Index n = 0;
  for (const auto& q : p.query_blocks) n += static_cast<Index>(q.points.size());
  return n;
}

/// pPITC and pPIC share everything but the per-machine predict step.
RunResult run_pitc_family(const Partition& partition, std::size_t query_size, const SupportSet& s,
                          const Hyperparameters& h, const RunOptions& options, bool pic,
                          Ledger ledger) {
  s.check_compatible(h);
  if (partition.machines() == 0) throw std::invalid_argument("partition has no machines");
  if (partition.query_blocks.size() != partition.machines())
    throw DimensionError("partition pairs " + std::to_string(partition.machines()) + " training blocks with " +
                         std::to_string(partition.query_blocks.size()) + " query blocks");
  if (static_cast<std::size_t>(sum_sizes(partition)) != query_size)
    throw DimensionError("query blocks hold " + std::to_string(sum_sizes(partition)) + " of " +
                         std::to_string(query_size) + " query points");

  const auto sz = static_cast<Index>(s.size());
  const bool full = options.want_full_cov;

  RunResult result;
  result.prediction.mean = Vector::Zero(static_cast<Index>(query_size));
  result.prediction.variances = Vector::Zero(static_cast<Index>(query_size));
  if (full) result.block_covariances.resize(partition.machines());

  auto transport = make_transport(options.transport);
  transport->execute(
      static_cast<int>(partition.machines()),
      [&](WorkerLink& link) {
        const auto m = static_cast<std::size_t>(link.rank());
        const Dataset& block = partition.blocks[m].data;
        const PointList& queries = partition.query_blocks[m].points;

        const PitcLocalSummary local = local_summary(block, s, h);
        std::vector<double> payload;
        append(payload, local.y_dot);
        append(payload, local.sigma_dot);
        link.send(MessageKind::kPitcLocalSummary, std::move(payload));

        const Message g = link.receive(MessageKind::kGlobalSummaryBroadcast);
        Unpacker in(g);
        PitcGlobalSummary global;
        global.y_ddot = in.vector(sz);
        global.sigma_ddot = in.matrix(sz, sz);
        in.done();

        const PredictiveDistribution p =
            pic ? ppic_predict_block(block, queries, s, local, global, h, full)
                : ppitc_predict_block(queries, s, global, h, block.prior_mean, full);
        link.send(MessageKind::kPredictiveComponent, pack_prediction(p));
      },
      [&](MasterLink& link) {
        Communicator comm(link, ledger);
        const auto msgs = comm.gather(MessageKind::kPitcLocalSummary);
        std::vector<PitcLocalSummary> locals(msgs.size());
        for (std::size_t m = 0; m < msgs.size(); ++m) {
          Unpacker in(msgs[m]);
          locals[m].y_dot = in.vector(sz);
          locals[m].sigma_dot = in.matrix(sz, sz);
          in.done();
        }
        const PitcGlobalSummary global = global_summary(locals, s, h);
        std::vector<double> payload;
        append(payload, global.y_ddot);
        append(payload, global.sigma_ddot);
        comm.broadcast(MessageKind::kGlobalSummaryBroadcast, payload);

        const auto parts = comm.gather(MessageKind::kPredictiveComponent);
        for (std::size_t m = 0; m < parts.size(); ++m) {
          const auto& qb = partition.query_blocks[m];
          PredictiveDistribution p =
              unpack_prediction(parts[m], static_cast<Index>(qb.points.size()), full);
          pargp::detail::scatter_rows(p, qb.source_index, result.prediction);
          if (full) result.block_covariances[m] = std::move(*p.covariance);
        }
      });
  result.ledger = ledger;
  result.partition = partition;
  return result;
}

struct IcfPayloadShape {
  Index rank;
  Index queries;
};

/// Worker half of pICF after the factorization.
void picf_worker_summaries(WorkerLink& link, const Dataset& block, const Matrix& f,
                           std::span<const InputPoint> query, const Hyperparameters& h,
                           const RunOptions& options, std::span<const Index> slices) {
  const Index r = f.rows();
  const auto u = static_cast<Index>(query.size());
  const IcfLocalSummary local = icf_local_summary(block, f, query, h);
  IcfGlobalSummary global;

  if (!options.partition_query) {
    std::vector<double> payload;
    append(payload, local.y_dot);
    append(payload, local.sigma_dot);
    append(payload, local.phi);
    link.send(MessageKind::kIcfLocalSummary, std::move(payload));

    const Message g = link.receive(MessageKind::kGlobalSummaryBroadcast);
    Unpacker in(g);
    global.y_ddot = in.vector(r);
    global.sigma_ddot = in.matrix(r, u);
    in.done();
  } else {
    std::vector<double> payload;
    append(payload, local.y_dot);
    append(payload, local.phi);
    link.send(MessageKind::kIcfLocalSummary, std::move(payload));
    Index offset = 0;
    for (Index size : slices) {
      link.send(MessageKind::kIcfSummarySlice,
                [&] {
                  std::vector<double> out;
                  append(out, Matrix(local.sigma_dot.middleCols(offset, size)));
                  return out;
                }());
      offset += size;
    }

    const Message g = link.receive(MessageKind::kGlobalSummaryBroadcast);
    Unpacker in(g);
    global.y_ddot = in.vector(r);
    global.phi_total = in.matrix(r, r);
    in.done();

    const Index mine = slices[static_cast<std::size_t>(link.rank())];
    std::vector<Matrix> pieces;
    for (int m = 0; m < link.workers(); ++m) {
      const Message piece = link.receive(MessageKind::kIcfSummarySlice);
      Unpacker pin(piece);
      pieces.push_back(pin.matrix(r, mine));
      pin.done();
    }
    const SpdFactor phi(symmetrize(global.phi_total));
    std::vector<double> slice;
    append(slice, icf_global_slice(phi, pieces));
    link.send(MessageKind::kIcfGlobalSlice, std::move(slice));

    const Message full = link.receive(MessageKind::kIcfGlobalSlice);
    Unpacker fin(full);
    global.sigma_ddot = fin.matrix(r, u);
    fin.done();
  }

  const IcfPredictiveComponent c =
      icf_predictive_component(block, local, global, query, h, options.want_full_cov);
  std::vector<double> payload;
  append(payload, c.mean_part);
  append(payload, c.cov_diagonal);
  if (c.cov_part) append(payload, *c.cov_part);
  link.send(MessageKind::kPredictiveComponent, std::move(payload));
}

/// Master half of pICF after the factorization; returns the components.
std::vector<IcfPredictiveComponent> picf_master_summaries(Communicator& comm, IcfPayloadShape shape,
                                                          const Hyperparameters& h,
                                                          const RunOptions& options,
                                                          std::span<const Index> slices) {
  const Index r = shape.rank;
  const Index u = shape.queries;
  const auto machines = static_cast<std::size_t>(comm.workers());

  if (!options.partition_query) {
    const auto msgs = comm.gather(MessageKind::kIcfLocalSummary);
    std::vector<IcfLocalSummary> locals(machines);
    for (std::size_t m = 0; m < machines; ++m) {
      Unpacker in(msgs[m]);
      locals[m].y_dot = in.vector(r);
      locals[m].sigma_dot = in.matrix(r, u);
      locals[m].phi = in.matrix(r, r);
      in.done();
    }
    const IcfGlobalSummary global = icf_global_summary(locals, h);
    std::vector<double> payload;
    append(payload, global.y_ddot);
    append(payload, global.sigma_ddot);
    comm.broadcast(MessageKind::kGlobalSummaryBroadcast, payload);
  } else {
    const auto msgs = comm.gather(MessageKind::kIcfLocalSummary);
    std::vector<Matrix> phis(machines);
    Vector y_sum = Vector::Zero(r);
    for (std::size_t m = 0; m < machines; ++m) {
      Unpacker in(msgs[m]);
      y_sum += in.vector(r);
      phis[m] = in.matrix(r, r);
      in.done();
    }
    // Slice i of every machine's sigma_dot goes to machine i.
    std::vector<std::vector<Message>> inbox(machines);
    for (std::size_t m = 0; m < machines; ++m)
      for (std::size_t i = 0; i < machines; ++i) {
        Message piece = comm.receive(static_cast<int>(m), MessageKind::kIcfSummarySlice);
        comm.ledger().record_message(MessageKind::kIcfSummarySlice, piece.payload_scalars());
        inbox[i].push_back(std::move(piece));
      }
    for (std::size_t i = 0; i < machines; ++i) comm.ledger().record_gather();

    const Matrix phi_total = icf_phi_total(phis, h);
    const SpdFactor phi(symmetrize(phi_total));
    if (phi.jitter() != 0.0) throw NumericalError("I + sigma_n^-2 sum Phi_m was not positive definite");
    std::vector<double> payload;
    append(payload, phi.solve(y_sum));
    append(payload, phi_total);
    comm.broadcast(MessageKind::kGlobalSummaryBroadcast, payload);
    for (std::size_t i = 0; i < machines; ++i)
      for (auto& piece : inbox[i]) comm.forward(static_cast<int>(i), std::move(piece));

    const auto slice_msgs = comm.gather(MessageKind::kIcfGlobalSlice);
    std::vector<double> sigma_ddot;
    sigma_ddot.reserve(static_cast<std::size_t>(r * u));
    for (std::size_t i = 0; i < machines; ++i) {
      Unpacker in(slice_msgs[i]);
      append(sigma_ddot, in.matrix(r, slices[i]));
      in.done();
    }
    comm.broadcast(MessageKind::kIcfGlobalSlice, sigma_ddot);
  }

  const auto parts = comm.gather(MessageKind::kPredictiveComponent);
  std::vector<IcfPredictiveComponent> components(machines);
  for (std::size_t m = 0; m < machines; ++m) {
    Unpacker in(parts[m]);
    components[m].mean_part = in.vector(u);
    components[m].cov_diagonal = in.vector(u);
    if (options.want_full_cov) components[m].cov_part = in.matrix(u, u);
    in.done();
  }
  return components;
}

RunResult run_picf_impl(const Partition& partition, std::span<const InputPoint> query,
                        std::size_t rank, const Hyperparameters& h, const RunOptions& options,
                        Ledger ledger);

}  // namespace

std::string_view partition_name(PartitionMode mode) {
  return mode == PartitionMode::kEven ? "even" : "clustered";
}

PartitionMode parse_partition(std::string_view name) {
  if (name == "even") return PartitionMode::kEven;
  if (name == "clustered") return PartitionMode::kClustered;
  throw std::invalid_argument("unknown partition mode '" + std::string(name) +
                              "' (expected even or clustered)");
}

Partition make_partition(const Dataset& train, std::span<const InputPoint> query,
                         const RunOptions& options, PartitionMode fallback, Ledger& ledger) {
  check_machines(options.machines);
  const PartitionMode mode = options.partition.value_or(fallback);
  if (mode == PartitionMode::kEven || options.machines == 1)
    return partition_even(train, query, options.machines);

  Partition p = partition_clustered(train, query, options.machines, options.partition_seed);
  const auto d = static_cast<std::uint64_t>(train.inputs.front().dim());
  for (std::size_t m = 0; m < options.machines; ++m) ledger.record_message(MessageKind::kClusterCenter, d);
  ledger.record_gather();

  // A point moves when its clustered block differs from its round-robin block.
  for (std::size_t m = 0; m < p.machines(); ++m) {
    for (std::size_t i : p.blocks[m].source_index)
      if (i % options.machines != m) ledger.record_message(MessageKind::kPointTransfer, d + 2);
    for (std::size_t i : p.query_blocks[m].source_index)
      if (i % options.machines != m) ledger.record_message(MessageKind::kPointTransfer, d + 1);
  }
  return p;
}

RunResult run_ppitc(const Dataset& train, std::span<const InputPoint> query, const SupportSet& s,
                    const Hyperparameters& h, const RunOptions& options) {
  Ledger ledger;
  Partition p = make_partition(train, query, options, PartitionMode::kEven, ledger);
  return run_pitc_family(p, query.size(), s, h, options, false, ledger);
}

RunResult run_ppitc(const Partition& partition, std::size_t query_size, const SupportSet& s,
                    const Hyperparameters& h, const RunOptions& options) {
  return run_pitc_family(partition, query_size, s, h, options, false, Ledger{});
}

RunResult run_ppic(const Dataset& train, std::span<const InputPoint> query, const SupportSet& s,
                   const Hyperparameters& h, const RunOptions& options) {
  Ledger ledger;
  Partition p = make_partition(train, query, options, PartitionMode::kClustered, ledger);
  return run_pitc_family(p, query.size(), s, h, options, true, ledger);
}

RunResult run_ppic(const Partition& partition, std::size_t query_size, const SupportSet& s,
                   const Hyperparameters& h, const RunOptions& options) {
  return run_pitc_family(partition, query_size, s, h, options, true, Ledger{});
}

RunResult run_picf(const Dataset& train, std::span<const InputPoint> query, std::size_t rank,
                   const Hyperparameters& h, const RunOptions& options) {
  Ledger ledger;
  Partition p = make_partition(train, query, options, PartitionMode::kEven, ledger);
  return run_picf_impl(p, query, rank, h, options, ledger);
}

RunResult run_picf(const Partition& partition, std::span<const InputPoint> query,
                   std::size_t rank, const Hyperparameters& h, const RunOptions& options) {
  return run_picf_impl(partition, query, rank, h, options, Ledger{});
}

namespace {

RunResult run_picf_impl(const Partition& partition, std::span<const InputPoint> query,
                        std::size_t rank, const Hyperparameters& h, const RunOptions& options,
                        Ledger ledger) {
  h.validate();
  if (h.noise_variance <= 0.0) throw std::invalid_argument("pICF requires a positive noise variance");
  if (partition.machines() == 0) throw std::invalid_argument("partition has no machines");
  std::size_t n = 0;
  for (const auto& b : partition.blocks) {
    check_dimensions(b.data.inputs, h);
    n += b.data.size();
  }
  check_dimensions(query, h);
  if (rank == 0 || rank > n)
    throw std::invalid_argument("rank " + std::to_string(rank) + " must lie in [1, " +
                                std::to_string(n) + "]");

  const auto machines = partition.machines();
  const std::vector<Index> slices = contiguous_slices(query.size(), machines);
  const IcfPayloadShape shape{static_cast<Index>(rank), static_cast<Index>(query.size())};

  RunResult result;
  auto transport = make_transport(options.transport);
  transport->execute(
      static_cast<int>(machines),
      [&](WorkerLink& link) {
        const Dataset& block = partition.blocks[static_cast<std::size_t>(link.rank())].data;
        pargp::detail::IcfWorker worker(block.inputs, rank, h);
        pargp::detail::icf_worker_protocol(link, worker, rank);
        picf_worker_summaries(link, block, worker.finish().entries, query, h, options, slices);
      },
      [&](MasterLink& link) {
        Communicator comm(link, ledger);
        pargp::detail::icf_master_protocol(comm, rank, h.signal_variance);
        const auto components = picf_master_summaries(comm, shape, h, options, slices);
        result.prediction = picf_predict(components, query, h, partition.blocks.front().data.prior_mean,
                                         options.want_full_cov);
      });
  result.ledger = ledger;
  result.partition = partition;
  return result;
}

}  // namespace

}  // namespace pargp::runtime
