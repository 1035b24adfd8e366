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

#include "pargp/types.hpp"

#include <string>
#include <unordered_set>

#include "pargp/errors.hpp"

namespace pargp {

void Hyperparameters::validate() const {
  if (!(signal_variance > 0.0))
    throw std::invalid_argument("signal_variance must be positive");
  if (!(noise_variance >= 0.0))
    throw std::invalid_argument("noise_variance must be nonnegative");
  if (length_scales.empty())
    throw std::invalid_argument("length_scales must not be empty");
  for (double l : length_scales)
    if (!(l > 0.0)) throw std::invalid_argument("length_scales must be positive");
}

Vector Dataset::residuals() const {
  return outputs.array() - prior_mean;
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(outputs.size()) != inputs.size())
    throw DimensionError("dataset has " + std::to_string(inputs.size()) + " inputs but " +
                         std::to_string(outputs.size()) + " outputs");
  std::unordered_set<PointId> seen;
  seen.reserve(inputs.size());
  for (const auto& x : inputs) {
    if (!seen.insert(x.id).second)
      throw std::invalid_argument("duplicate point id " + std::to_string(x.id) + " in dataset");
    if (x.dim() != inputs.front().dim())
      throw DimensionError("dataset mixes dimensions " + std::to_string(inputs.front().dim()) +
                           " and " + std::to_string(x.dim()));
  }
}

}  // namespace pargp
