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

#include "pargp/eval/metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pargp/errors.hpp"

namespace pargp::eval {
namespace {

void check_lengths(const PredictiveDistribution& p, const Vector& truth) {
  if (p.mean.size() != truth.size() || p.variances.size() != truth.size())
    throw DimensionError("prediction has " + std::to_string(p.mean.size()) + " entries but truth has " +
                         std::to_string(truth.size()));
  if (truth.size() == 0) throw std::invalid_argument("metrics need at least one test point");
}

}  // namespace

double rmse(const PredictiveDistribution& predicted, const Vector& truth) {
  check_lengths(predicted, truth);
  double sum = 0.0;
  for (Index i = 0; i < truth.size(); ++i) {
    const double e = truth[i] - predicted.mean[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

MnlpResult mnlp(const PredictiveDistribution& predicted, const Vector& truth) {
  check_lengths(predicted, truth);
  MnlpResult out;
  double sum = 0.0;
  for (Index i = 0; i < truth.size(); ++i) {
    double var = predicted.variances[i];
    if (!(var >= kVarianceFloor)) {
      var = kVarianceFloor;
      ++out.floored;
    }
    const double e = truth[i] - predicted.mean[i];
    sum += e * e / var + std::log(2.0 * std::numbers::pi * var);
  }
  out.value = 0.5 * sum / static_cast<double>(truth.size());
  return out;
}

std::size_t negative_variance_count(const PredictiveDistribution& predicted) {
  std::size_t n = 0;
  for (Index i = 0; i < predicted.variances.size(); ++i)
    if (predicted.variances[i] < 0.0) ++n;
  return n;
}

}  // namespace pargp::eval
