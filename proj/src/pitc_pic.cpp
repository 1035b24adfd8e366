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

#include "pargp/pitc_pic.hpp"

#include <stdexcept>
#include <string>

#include "pargp/errors.hpp"
#include "pargp/exact_gp.hpp"
#include "pargp/kernel.hpp"

namespace pargp {
namespace {

bool same_hyperparameters(const Hyperparameters& a, const Hyperparameters& b) {
  return a.signal_variance == b.signal_variance && a.noise_variance == b.noise_variance &&
         a.length_scales == b.length_scales;
}

Vector prior_diagonal(std::span<const InputPoint> query, const Hyperparameters& h) {
  Vector d(static_cast<Index>(query.size()));
  for (std::size_t i = 0; i < query.size(); ++i) d(static_cast<Index>(i)) = kernel(query[i], query[i], h);
  return d;
}

void check_summary_shape(const Vector& y, const Matrix& sigma, std::size_t s, const char* what) {
  const auto n = static_cast<Index>(s);
  if (y.size() != n || sigma.rows() != n || sigma.cols() != n)
    throw DimensionError(std::string(what) + " does not match support set size " + std::to_string(s));
}

// Block-local pieces shared by the pPIC prediction: with L_C the Cholesky
// factor of Sigma_{D_m D_m|S}, holds L_C^{-1} applied to the residuals,
// Sigma_{D_m U_m} and Sigma_{D_m S}.
struct LocalWhitened {
  Vector r;
  Matrix u;
  Matrix s;
};

LocalWhitened whiten_block(const Dataset& block, std::span<const InputPoint> query,
                           const SupportSet& s, const Hyperparameters& h) {
  const SpdFactor cond(conditional_cov(block.inputs, s, h));
  LocalWhitened w;
  w.r = cond.half_solve(block.residuals());
  w.u = cond.half_solve(cov_matrix(block.inputs, query, h));
  w.s = cond.half_solve(cov_matrix(block.inputs, s.points(), h));
  return w;
}

}  // namespace

SupportSet::SupportSet(PointList points, const Hyperparameters& h)
    : points_(std::move(points)), h_(h) {
  h_.validate();
  if (points_.empty()) throw std::invalid_argument("support set must not be empty");
  cov_ = cov_matrix(points_, h_);
  factor_ = SpdFactor(cov_);
}

void SupportSet::check_compatible(const Hyperparameters& h) const {
  if (!same_hyperparameters(h, h_))
    throw std::invalid_argument("support set was built with different hyperparameters");
}

Matrix conditional_cov(std::span<const InputPoint> block, const SupportSet& s,
                       const Hyperparameters& h) {
  s.check_compatible(h);
  const Matrix w = s.factor().half_solve(cov_matrix(s.points(), block, h));
  Matrix c = cov_matrix(block, h);
  c.noalias() -= w.transpose() * w;
  return symmetrize(c);
}

PitcLocalSummary local_summary(const Dataset& block, const SupportSet& s, const Hyperparameters& h) {
  s.check_compatible(h);
  const auto n_s = static_cast<Index>(s.size());
  if (block.empty()) return {Vector::Zero(n_s), Matrix::Zero(n_s, n_s)};
  block.validate();

  const SpdFactor cond(conditional_cov(block.inputs, s, h));
  const Matrix g = cond.half_solve(cov_matrix(block.inputs, s.points(), h));
  const Vector gr = cond.half_solve(block.residuals());

  PitcLocalSummary out;
  out.y_dot = g.transpose() * gr;
  const Matrix gram = g.transpose() * g;
  out.sigma_dot = 0.5 * (gram + gram.transpose());
  return out;
}

PitcGlobalSummary global_summary(std::span<const PitcLocalSummary> locals, const SupportSet& s,
                                 const Hyperparameters& h) {
  s.check_compatible(h);
  PitcGlobalSummary out;
  out.y_ddot = Vector::Zero(static_cast<Index>(s.size()));
  out.sigma_ddot = s.cov();
  for (std::size_t m = 0; m < locals.size(); ++m) {
    check_summary_shape(locals[m].y_dot, locals[m].sigma_dot, s.size(),
                        ("local summary of machine " + std::to_string(m)).c_str());
    out.y_ddot += locals[m].y_dot;
    out.sigma_ddot += locals[m].sigma_dot;
  }
  return out;
}

PredictiveDistribution ppitc_predict_block(std::span<const InputPoint> query_block,
                                           const SupportSet& s, const PitcGlobalSummary& global,
                                           const Hyperparameters& h, double prior_mean,
                                           bool want_full_cov) {
  s.check_compatible(h);
  check_summary_shape(global.y_ddot, global.sigma_ddot, s.size(), "global summary");

  const SpdFactor total(symmetrize(global.sigma_ddot));
  const Matrix k_su = cov_matrix(s.points(), query_block, h);

  PredictiveDistribution out;
  out.mean = (k_su.transpose() * total.solve(global.y_ddot)).array() + prior_mean;

  const Matrix prior_part = s.factor().half_solve(k_su);
  const Matrix summary_part = total.half_solve(k_su);
  if (want_full_cov) {
    Matrix cov = cov_matrix(query_block, h);
    cov.noalias() -= prior_part.transpose() * prior_part;
    cov.noalias() += summary_part.transpose() * summary_part;
    out.variances = cov.diagonal();
    out.covariance = std::move(cov);
  } else {
    out.variances = prior_diagonal(query_block, h) -
                    prior_part.colwise().squaredNorm().transpose() +
                    summary_part.colwise().squaredNorm().transpose();
  }
  return out;
}

PredictiveDistribution ppic_predict_block(const Dataset& block,
                                          std::span<const InputPoint> query_block,
                                          const SupportSet& s, const PitcLocalSummary& local,
                                          const PitcGlobalSummary& global,
                                          const Hyperparameters& h, bool want_full_cov) {
  s.check_compatible(h);
  check_summary_shape(local.y_dot, local.sigma_dot, s.size(), "local summary");
  check_summary_shape(global.y_ddot, global.sigma_ddot, s.size(), "global summary");
  if (block.empty())
    return ppitc_predict_block(query_block, s, global, h, block.prior_mean, want_full_cov);

  const SpdFactor total(symmetrize(global.sigma_ddot));
  const Matrix k_us = cov_matrix(query_block, s.points(), h);
  const Matrix p = s.factor().solve(Matrix(k_us.transpose()));  // Sigma_SS^{-1} Sigma_SU

  const LocalWhitened w = whiten_block(block, query_block, s, h);
  const Vector y_dot_u = w.u.transpose() * w.r;
  const Matrix sigma_dot_us = w.u.transpose() * w.s;

  // Phi_{U_m S} = Sigma_{U_m S} + Sigma_{U_m S} Sigma_SS^{-1} Sigma_dot_SS - Sigma_dot_{U_m S}
  const Matrix phi = k_us + p.transpose() * local.sigma_dot - sigma_dot_us;

  PredictiveDistribution out;
  out.mean = phi * total.solve(global.y_ddot) - p.transpose() * local.y_dot + y_dot_u;
  out.mean.array() += block.prior_mean;

  const Matrix phi_t = phi.transpose();
  const Matrix sigma_dot_su = sigma_dot_us.transpose();
  if (want_full_cov) {
    Matrix correction = phi * p - p.transpose() * sigma_dot_su - phi * total.solve(phi_t);
    Matrix cov = cov_matrix(query_block, h) - correction;
    cov.noalias() -= w.u.transpose() * w.u;
    cov = symmetrize(cov);
    out.variances = cov.diagonal();
    out.covariance = std::move(cov);
  } else {
    const Vector correction = phi.cwiseProduct(p.transpose()).rowwise().sum() -
                              p.cwiseProduct(sigma_dot_su).colwise().sum().transpose() -
                              quadratic_diagonal(total, phi_t);
    out.variances =
        prior_diagonal(query_block, h) - correction - w.u.colwise().squaredNorm().transpose();
  }
  return out;
}

namespace detail {

void scatter_rows(const PredictiveDistribution& part, std::span<const std::size_t> index,
                  PredictiveDistribution& out) {
  if (static_cast<std::size_t>(part.mean.size()) != index.size())
    throw DimensionError("block prediction size does not match its index list");
  for (std::size_t k = 0; k < index.size(); ++k) {
    out.mean(static_cast<Index>(index[k])) = part.mean(static_cast<Index>(k));
    out.variances(static_cast<Index>(index[k])) = part.variances(static_cast<Index>(k));
  }
}

PredictiveDistribution centralized_pic(const Dataset& train, const Partition& partition,
                                       std::span<const InputPoint> query, const SupportSet& s,
                                       const Hyperparameters& h, bool want_full_cov,
                                       bool keep_local_blocks) {
  s.check_compatible(h);
  partition.validate_covers(train, query);
  const Dataset d = partition.stacked_train();
  const PointList u = partition.stacked_query();
  const auto order = partition.stacked_query_index();

  // Gamma_{BB'} = Sigma_BS Sigma_SS^{-1} Sigma_SB' as W_B^T W_B'.
  const Matrix w_d = s.factor().half_solve(cov_matrix(s.points(), d.inputs, h));
  const Matrix w_u = s.factor().half_solve(cov_matrix(s.points(), u, h));

  // Lambda: block-diagonal of Sigma_{DD|S} along the training blocks.
  const auto n = static_cast<Index>(d.size());
  Matrix lambda = Matrix::Zero(n, n);
  Matrix gamma_ud = w_u.transpose() * w_d;
  Index row0 = 0;
  Index col0 = 0;
  for (std::size_t m = 0; m < partition.machines(); ++m) {
    const auto& block = partition.blocks[m].data.inputs;
    const auto& qblock = partition.query_blocks[m].points;
    const auto nb = static_cast<Index>(block.size());
    const auto nq = static_cast<Index>(qblock.size());
    const Matrix w_b = w_d.middleCols(col0, nb);
    lambda.block(col0, col0, nb, nb) = cov_matrix(block, h) - w_b.transpose() * w_b;
    if (keep_local_blocks) gamma_ud.block(row0, col0, nq, nb) = cov_matrix(qblock, block, h);
    row0 += nq;
    col0 += nb;
  }

  Matrix q = w_d.transpose() * w_d + lambda;
  const SpdFactor factor(symmetrize(q));

  PredictiveDistribution stacked;
  stacked.mean = (gamma_ud * factor.solve(d.residuals())).array() + d.prior_mean;
  const Matrix half = factor.half_solve(Matrix(gamma_ud.transpose()));
  Matrix stacked_cov;
  if (want_full_cov) {
    stacked_cov = cov_matrix(u, h);
    stacked_cov.noalias() -= half.transpose() * half;
    stacked.variances = stacked_cov.diagonal();
  } else {
    stacked.variances = prior_diagonal(u, h) - half.colwise().squaredNorm().transpose();
  }

  PredictiveDistribution out;
  out.mean.resize(stacked.mean.size());
  out.variances.resize(stacked.variances.size());
  scatter_rows(stacked, order, out);
  if (want_full_cov) {
    Matrix cov(stacked_cov.rows(), stacked_cov.cols());
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = 0; j < order.size(); ++j)
        cov(static_cast<Index>(order[i]), static_cast<Index>(order[j])) =
            stacked_cov(static_cast<Index>(i), static_cast<Index>(j));
    out.covariance = std::move(cov);
  }
  return out;
}

}  // namespace detail

PredictiveDistribution centralized_pitc(const Dataset& train, const Partition& partition,
                                        std::span<const InputPoint> query, const SupportSet& s,
                                        const Hyperparameters& h, bool want_full_cov) {
  s.check_compatible(h);
  partition.validate_covers(train, query);
  const Dataset d = partition.stacked_train();

  const Matrix w_d = s.factor().half_solve(cov_matrix(s.points(), d.inputs, h));
  const Matrix w_u = s.factor().half_solve(cov_matrix(s.points(), query, h));
  const Matrix gamma_dd = w_d.transpose() * w_d;
  const Matrix gamma_ud = w_u.transpose() * w_d;

  const auto n = static_cast<Index>(d.size());
  Matrix lambda = Matrix::Zero(n, n);
  Index offset = 0;
  for (const auto& b : partition.blocks) {
    const auto nb = static_cast<Index>(b.data.size());
    lambda.block(offset, offset, nb, nb) =
        cov_matrix(b.data.inputs, h) - gamma_dd.block(offset, offset, nb, nb);
    offset += nb;
  }
  const SpdFactor factor(symmetrize(gamma_dd + lambda));

  PredictiveDistribution out;
  out.mean = (gamma_ud * factor.solve(d.residuals())).array() + d.prior_mean;
  const Matrix half = factor.half_solve(Matrix(gamma_ud.transpose()));
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

PredictiveDistribution centralized_pic(const Dataset& train, const Partition& partition,
                                       std::span<const InputPoint> query, const SupportSet& s,
                                       const Hyperparameters& h, bool want_full_cov) {
  return detail::centralized_pic(train, partition, query, s, h, want_full_cov, true);
}

}  // namespace pargp
