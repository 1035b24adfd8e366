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

#include "pargp/exact_gp.hpp"

#include "pargp/kernel.hpp"
#include "pargp/linalg.hpp"

namespace pargp {

PredictiveDistribution prior_predict(std::span<const InputPoint> query, double prior_mean,
                                     const Hyperparameters& h, bool want_full_cov) {
  check_dimensions(query, h);
  PredictiveDistribution out;
  const auto u = static_cast<Index>(query.size());
  out.mean = Vector::Constant(u, prior_mean);
  out.variances.resize(u);
  for (Index i = 0; i < u; ++i)
    out.variances(i) = kernel(query[static_cast<std::size_t>(i)], query[static_cast<std::size_t>(i)], h);
  if (want_full_cov) out.covariance = cov_matrix(query, h);
  return out;
}

PredictiveDistribution fgp_predict(const Dataset& train, std::span<const InputPoint> query,
                                   const Hyperparameters& h, bool want_full_cov) {
  h.validate();
  if (train.empty()) return prior_predict(query, train.prior_mean, h, want_full_cov);
  train.validate();

  const Matrix k_dd = cov_matrix(train.inputs, h);
  const Matrix k_du = cov_matrix(train.inputs, query, h);
  const SpdFactor chol(k_dd);

  PredictiveDistribution out;
  out.mean = (k_du.transpose() * chol.solve(train.residuals())).array() + train.prior_mean;

  if (want_full_cov) {
    const Matrix v = chol.half_solve(k_du);
    Matrix cov = cov_matrix(query, h);
    cov.noalias() -= v.transpose() * v;
    out.variances = cov.diagonal();
    out.covariance = std::move(cov);
  } else {
    out.variances.resize(k_du.cols());
    for (Index i = 0; i < k_du.cols(); ++i) {
      const auto& u = query[static_cast<std::size_t>(i)];
      out.variances(i) = kernel(u, u, h);
    }
    out.variances -= quadratic_diagonal(chol, k_du);
  }
  return out;
}

}  // namespace pargp
