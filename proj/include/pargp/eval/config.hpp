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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pargp/runtime/runtime.hpp"
#include "pargp/types.hpp"

namespace pargp::eval {

enum class Method { kFgp, kPpitc, kPpic, kPicf, kPitc, kPic, kIcf };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// True for the methods that run on the master-worker runtime.
bool is_parallel(Method m);
/// pPITC/pPIC/PITC/PIC take a support size; pICF/ICF take a rank.
bool uses_support_set(Method m);
bool uses_rank(Method m);
/// PITC for pPITC, PIC for pPIC, ICF for pICF; nullopt otherwise.
std::optional<Method> centralized_counterpart(Method m);

struct SyntheticSpec {
  std::size_t dim = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct RunConfig {
  Method method = Method::kFgp;
  std::size_t machines = 1;
  std::optional<std::size_t> support_size;
  std::optional<std::size_t> rank;

  double signal_variance = 1.0;
  double noise_variance = 0.1;
  /// Empty means one unit length-scale per input dimension.
  std::vector<double> length_scales;
  double prior_mean = 0.0;

  /// Seeds the synthetic draw and the test split.
  std::uint64_t seed = 1;
  /// Seeds cluster centers and the support-candidate pool.
  std::uint64_t partition_seed = 1;
  std::size_t support_pool_size = 2048;
  double test_fraction = 0.1;

  std::optional<runtime::PartitionMode> partition;
  runtime::TransportKind transport = runtime::TransportKind::kThreads;
  bool full_cov = false;
  bool partition_query = false;

  std::string train_path;
  std::string test_path;
  std::string out_path;
  std::string ledger_path;
  std::optional<SyntheticSpec> synthetic;

  /// Hyperparameters with the length-scales expanded to dimension d.
  Hyperparameters hyperparameters(std::size_t d) const;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Sets one field from its textual value; unknown keys and malformed values
/// raise ConfigError naming the key.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` text; `#` starts a comment, blank lines are skipped.
void parse_config(RunConfig& config, std::string_view text);
void load_config(RunConfig& config, const std::string& path);

}  // namespace pargp::eval
