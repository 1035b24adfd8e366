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

#include "pargp/types.hpp"

namespace pargp {

/// Full GP posterior over `query` given `train`.
///
/// mean = mu_U + Sigma_UD Sigma_DD^{-1} (y_D - mu_D) and
/// cov  = Sigma_UU - Sigma_UD Sigma_DD^{-1} Sigma_DU.
/// An empty training set yields the prior. Only marginal variances are formed
/// unless `want_full_cov` is set.
PredictiveDistribution fgp_predict(const Dataset& train, std::span<const InputPoint> query,
                                   const Hyperparameters& h, bool want_full_cov = false);

/// Prior distribution N(mu, Sigma_UU) over `query`.
PredictiveDistribution prior_predict(std::span<const InputPoint> query, double prior_mean,
                                     const Hyperparameters& h, bool want_full_cov = false);

}  // namespace pargp
