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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace oracle {

PointList random_points(std::size_t n, std::size_t d, std::mt19937_64& rng, std::int64_t first_id) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  PointList out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = first_id + static_cast<std::int64_t>(i);
    out[i].coords.resize(d);
    for (double& c : out[i].coords) c = u(rng);
  }
  return out;
}

Dataset random_dataset(std::size_t n, std::size_t d, std::mt19937_64& rng, std::int64_t first_id,
                       double prior_mean) {
  Dataset out;
  out.inputs = random_points(n, d, rng, first_id);
  out.prior_mean = prior_mean;
  std::normal_distribution<double> z;
  out.outputs.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.outputs.size(); ++i) out.outputs[i] = prior_mean + z(rng);
  return out;
}

Hyperparameters hyper(std::size_t d, double signal, double noise, double length) {
  Hyperparameters h;
  h.signal_variance = signal;
  h.noise_variance = noise;
  h.length_scales.assign(d, length);
  return h;
}

double k(const InputPoint& a, const InputPoint& b, const Hyperparameters& h) {
  double q = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const double t = (a.coords[i] - b.coords[i]) / h.length_scales[i];
    q += t * t;
  }
  return h.signal_variance * std::exp(-0.5 * q) + (a.id == b.id ? h.noise_variance : 0.0);
}

Matrix k(const PointList& a, const PointList& b, const Hyperparameters& h) {
  Matrix out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k(a[i], b[j], h);
  return out;
}

Matrix inv(const Matrix& a) { return Eigen::FullPivLU<Matrix>(a).inverse(); }

Dense fgp(const Dataset& train, const PointList& query, const Hyperparameters& h) {
  const Matrix kdd_inv = inv(k(train.inputs, train.inputs, h));
  const Matrix kud = k(query, train.inputs, h);
  Dense out;
  out.mean = (kud * kdd_inv * (train.outputs.array() - train.prior_mean).matrix()).array() + train.prior_mean;
  out.cov = k(query, query, h) - kud * kdd_inv * kud.transpose();
  return out;
}

namespace {

Dataset stack(const std::vector<Dataset>& blocks) {
  Dataset d;
  std::vector<double> y;
  for (const auto& b : blocks) {
    d.inputs.insert(d.inputs.end(), b.inputs.begin(), b.inputs.end());
    y.insert(y.end(), b.outputs.data(), b.outputs.data() + b.outputs.size());
  }
  d.outputs = Eigen::Map<Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  return d;
}

/// Gamma_AB = Sigma_AS Sigma_SS^{-1} Sigma_SB.
Matrix gamma(const PointList& a, const PointList& b, const PointList& s, const Matrix& kss_inv,
             const Hyperparameters& h) {
  return k(a, s, h) * kss_inv * k(s, b, h);
}

/// Gamma_DD + Lambda with Lambda the block diagonal of Sigma_{DD|S}.
Matrix pitc_train_cov(const std::vector<Dataset>& blocks, const Dataset& d, const PointList& s,
                      const Matrix& kss_inv, const Hyperparameters& h) {
  Matrix out = gamma(d.inputs, d.inputs, s, kss_inv, h);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    const auto n = static_cast<Eigen::Index>(b.inputs.size());
    out.block(off, off, n, n) = k(b.inputs, b.inputs, h);
    off += n;
  }
  return out;
}

}  // namespace

Dense pitc(const std::vector<Dataset>& blocks, const PointList& query, const PointList& support,
           const Hyperparameters& h, double prior_mean) {
  const Dataset d = stack(blocks);
  const Matrix kss_inv = inv(k(support, support, h));
  const Matrix a_inv = inv(pitc_train_cov(blocks, d, support, kss_inv, h));
  const Matrix g_ud = gamma(query, d.inputs, support, kss_inv, h);
  Dense out;
  out.mean = (g_ud * a_inv * (d.outputs.array() - prior_mean).matrix()).array() + prior_mean;
  out.cov = k(query, query, h) - g_ud * a_inv * g_ud.transpose();
  return out;
}

Dense pic(const std::vector<Dataset>& blocks, const std::vector<PointList>& query_blocks,
          const PointList& support, const Hyperparameters& h, double prior_mean) {
  const Dataset d = stack(blocks);
  PointList u;
  for (const auto& q : query_blocks) u.insert(u.end(), q.begin(), q.end());
  const Matrix kss_inv = inv(k(support, support, h));
  const Matrix a_inv = inv(pitc_train_cov(blocks, d, support, kss_inv, h));

  Matrix g(static_cast<Eigen::Index>(u.size()), static_cast<Eigen::Index>(d.inputs.size()));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < query_blocks.size(); ++i) {
    const auto rows = static_cast<Eigen::Index>(query_blocks[i].size());
    Eigen::Index col = 0;
    for (std::size_t m = 0; m < blocks.size(); ++m) {
      const auto cols = static_cast<Eigen::Index>(blocks[m].inputs.size());
      g.block(row, col, rows, cols) = i == m ? k(query_blocks[i], blocks[m].inputs, h)
                                             : gamma(query_blocks[i], blocks[m].inputs, support, kss_inv, h);
      col += cols;
    }
    row += rows;
  }
  Dense out;
  out.mean = (g * a_inv * (d.outputs.array() - prior_mean).matrix()).array() + prior_mean;
  out.cov = k(u, u, h) - g * a_inv * g.transpose();
  return out;
}

Dense icf(const Dataset& train, const Matrix& f, const PointList& query, const Hyperparameters& h) {
  const Matrix a = f.transpose() * f +
                   h.noise_variance * Matrix::Identity(f.cols(), f.cols());
  const Matrix a_inv = inv(a);
  const Matrix kud = k(query, train.inputs, h);
  Dense out;
  out.mean = (kud * a_inv * (train.outputs.array() - train.prior_mean).matrix()).array() + train.prior_mean;
  out.cov = k(query, query, h) - kud * a_inv * kud.transpose();
  return out;
}

Matrix pivoted_cholesky(const Matrix& kmat, std::size_t rank, double stop) {
  const Eigen::Index n = kmat.rows();
  Matrix f = Matrix::Zero(static_cast<Eigen::Index>(rank), n);
  Vector d = kmat.diagonal();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(rank); ++r) {
    Eigen::Index p = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!used[static_cast<std::size_t>(j)] && (p < 0 || d[j] > d[p])) p = j;
    if (p < 0 || d[p] < stop) break;
    used[static_cast<std::size_t>(p)] = true;
    const double piv = std::sqrt(d[p]);
    f(r, p) = piv;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      f(r, j) = (kmat(p, j) - f.col(p).head(r).dot(f.col(j).head(r))) / piv;
      d[j] -= f(r, j) * f(r, j);
    }
  }
  return f;
}

std::vector<std::size_t> greedy_support(const PointList& candidates, std::size_t count,
                                        const Hyperparameters& h) {
  std::vector<std::size_t> chosen;
  for (std::size_t step = 0; step < count; ++step) {
    PointList s;
    for (std::size_t c : chosen) s.push_back(candidates[c]);
    Matrix kss_inv;
    if (!s.empty()) kss_inv = inv(k(s, s, h));
    std::size_t best = candidates.size();
    double best_var = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      double var = k(candidates[i], candidates[i], h);
      if (!s.empty()) {
        const Matrix kxs = k(PointList{candidates[i]}, s, h);
        var -= (kxs * kss_inv * kxs.transpose())(0, 0);
      }
      if (var > best_var) {
        best_var = var;
        best = i;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

std::vector<Dataset> blocks_of(const pargp::Partition& p) {
  std::vector<Dataset> out;
  for (const auto& b : p.blocks) out.push_back(b.data);
  return out;
}

std::vector<PointList> query_blocks_of(const pargp::Partition& p) {
  std::vector<PointList> out;
  for (const auto& q : p.query_blocks) out.push_back(q.points);
  return out;
}

Vector unstack(const Vector& stacked, const pargp::Partition& p, std::size_t query_size) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(query_size));
  Eigen::Index row = 0;
  for (const auto& q : p.query_blocks)
    for (std::size_t i : q.source_index) out[static_cast<Eigen::Index>(i)] = stacked[row++];
  return out;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace oracle
