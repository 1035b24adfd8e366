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
#include <string>
#include <string_view>
#include <vector>

#include "pargp/eval/config.hpp"
#include "pargp/runtime/ledger.hpp"
#include "pargp/types.hpp"

namespace pargp::eval {

struct ExperimentData {
  Dataset train;
  /// Query inputs; outputs are present only when the truth is known.
  Dataset test;
  bool test_has_truth = true;
};

/// Loads the CSV files or draws synthetic data. A lone training file is
/// split by a seeded uniform draw of test_fraction of its rows.
ExperimentData load_data(const RunConfig& config);

struct MethodOutput {
  PredictiveDistribution prediction;
  runtime::Ledger ledger;
  double seconds = 0.0;
};

/// Runs the configured method. The support set (when needed) is selected
/// greedily from a seeded candidate pool before the clock starts.
MethodOutput run_method(const RunConfig& config, const Dataset& train,
                        std::span<const InputPoint> query, const Hyperparameters& h);

struct MetricsReport {
  double rmse = 0.0;
  double mnlp = 0.0;
  double wall_time_seconds = 0.0;
  std::size_t negative_variance_count = 0;
  std::size_t floored_variance_count = 0;
  runtime::Ledger ledger;
};

struct ResultRow {
  std::string method;
  std::size_t n_train = 0;
  std::size_t machines = 0;
  /// Support size or rank; 0 for the full GP.
  std::size_t param = 0;
  double rmse = 0.0;
  double mnlp = 0.0;
  double seconds = 0.0;
  std::size_t negative_variances = 0;
};

struct ExperimentResult {
  MetricsReport metrics;
  ResultRow row;
  PredictiveDistribution prediction;
};

ExperimentResult run_experiment(const RunConfig& config);

std::string csv_header();
std::string format_row(const ResultRow& row);

struct SweepSpec {
  std::string key;
  std::vector<std::string> values;
};

/// Parses KEY=v1,v2,...
SweepSpec parse_sweep(std::string_view text);

/// One experiment per value, in the order given.
std::vector<ExperimentResult> run_sweep(const RunConfig& base, const SweepSpec& sweep);

/// centralized time / parallel time for every parallel row whose centralized
/// counterpart (same size, machines and parameter) is also present.
std::vector<std::string> speedup_report(std::span<const ResultRow> rows);

}  // namespace pargp::eval
