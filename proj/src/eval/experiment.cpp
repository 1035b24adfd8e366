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

#include "pargp/eval/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pargp/errors.hpp"
#include "pargp/eval/dataset_io.hpp"
#include "pargp/eval/metrics.hpp"
#include "pargp/eval/synthetic.hpp"
#include "pargp/exact_gp.hpp"
#include "pargp/icf_gp.hpp"
#include "pargp/partitioning.hpp"
#include "pargp/pitc_pic.hpp"
#include "pargp/runtime/runtime.hpp"

namespace pargp::eval {
namespace {

std::string number(double x) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Dataset subset(const PointList& inputs, const Vector& outputs, std::span<const std::size_t> rows,
               double prior_mean) {
  Dataset out;
  out.prior_mean = prior_mean;
  out.outputs.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.inputs.push_back(inputs[rows[k]]);
    out.outputs[static_cast<Index>(k)] = outputs[static_cast<Index>(rows[k])];
  }
  return out;
}

runtime::RunOptions run_options(const RunConfig& c) {
  runtime::RunOptions o;
  o.machines = c.machines;
  o.partition = c.partition;
  o.partition_seed = c.partition_seed;
  o.transport = c.transport;
  o.want_full_cov = c.full_cov;
  o.partition_query = c.partition_query;
  return o;
}

}  // namespace

ExperimentData load_data(const RunConfig& config) {
  ExperimentData out;
  if (config.synthetic) {
    const auto& s = *config.synthetic;
    const Hyperparameters h = config.hyperparameters(s.dim);
    SyntheticData d = generate_synthetic_tiled(s.dim, s.n_train, s.n_test, h, config.seed, config.prior_mean);
    out.train = std::move(d.train);
    out.test = std::move(d.test);
    return out;
  }

  CsvTable train = read_csv_file(config.train_path, 0);
  if (!train.outputs) throw ConfigError("train: '" + config.train_path + "' has no y column");
  const std::size_t n = train.inputs.size();
  if (!config.test_path.empty()) {
    CsvTable test = read_csv_file(config.test_path, static_cast<PointId>(n));
    out.train.inputs = std::move(train.inputs);
    out.train.outputs = std::move(*train.outputs);
    out.train.prior_mean = config.prior_mean;
    out.test.inputs = std::move(test.inputs);
    out.test.prior_mean = config.prior_mean;
    out.test_has_truth = test.outputs.has_value();
    out.test.outputs = test.outputs ? *test.outputs : Vector::Zero(static_cast<Index>(out.test.inputs.size()));
    return out;
  }

  if (n < 2) throw ConfigError("train: need at least two rows to split off a test set");
  const auto n_test = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.test_fraction * static_cast<double>(n))), 1, n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> test_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  out.train = subset(train.inputs, *train.outputs, train_rows, config.prior_mean);
  out.test = subset(train.inputs, *train.outputs, test_rows, config.prior_mean);
  return out;
}

MethodOutput run_method(const RunConfig& config, const Dataset& train,
                        std::span<const InputPoint> query, const Hyperparameters& h) {
  config.validate();
  const runtime::RunOptions options = run_options(config);
  const Method m = config.method;

  std::optional<SupportSet> s;
  if (uses_support_set(m)) {
    if (*config.support_size > train.size())
      throw ConfigError("support_size: " + std::to_string(*config.support_size) + " exceeds the " +
                        std::to_string(train.size()) + " training points");
    const auto pool_size = std::max(config.support_pool_size, *config.support_size);
    auto first = static_cast<PointId>(train.size());
    for (const auto& p : train.inputs) first = std::max(first, p.id + 1);
    for (const auto& p : query) first = std::max(first, p.id + 1);
    const PointList candidates = support_candidates(train, pool_size, config.partition_seed, first);
    s.emplace(select_support_set(candidates, *config.support_size, h), h);
  }
  if (uses_rank(m) && *config.rank > train.size())
    throw ConfigError("rank: " + std::to_string(*config.rank) + " exceeds the " +
                      std::to_string(train.size()) + " training points");

  MethodOutput out;
  const auto start = std::chrono::steady_clock::now();
  switch (m) {
    case Method::kFgp:
      out.prediction = fgp_predict(train, query, h, config.full_cov);
      break;
    case Method::kPpitc: {
      auto r = runtime::run_ppitc(train, query, *s, h, options);
      out.prediction = std::move(r.prediction);
      out.ledger = r.ledger;
      break;
    }
    case Method::kPpic: {
      auto r = runtime::run_ppic(train, query, *s, h, options);
      out.prediction = std::move(r.prediction);
      out.ledger = r.ledger;
      break;
    }
    case Method::kPicf: {
      auto r = runtime::run_picf(train, query, *config.rank, h, options);
      out.prediction = std::move(r.prediction);
      out.ledger = r.ledger;
      break;
    }
    case Method::kPitc:
    case Method::kPic: {
      runtime::Ledger unused;
      const auto fallback = m == Method::kPic ? runtime::PartitionMode::kClustered : runtime::PartitionMode::kEven;
      const Partition p = runtime::make_partition(train, query, options, fallback, unused);
      out.prediction = m == Method::kPic ? centralized_pic(train, p, query, *s, h, config.full_cov)
                                         : centralized_pitc(train, p, query, *s, h, config.full_cov);
      break;
    }
    case Method::kIcf: {
      const IcfFactor f = icf_factor_serial(train.inputs, *config.rank, h);
      out.prediction = centralized_icf(train, f.f, query, h, config.full_cov);
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ExperimentResult run_experiment(const RunConfig& config) {
  config.validate();
  const ExperimentData data = load_data(config);
  const std::size_t d = data.train.empty() ? 0 : data.train.inputs.front().dim();
  const Hyperparameters h = config.hyperparameters(d);

  MethodOutput m = run_method(config, data.train, data.test.inputs, h);

  ExperimentResult out;
  out.metrics.wall_time_seconds = m.seconds;
  out.metrics.negative_variance_count = negative_variance_count(m.prediction);
  out.metrics.ledger = m.ledger;
  if (data.test_has_truth) {
    out.metrics.rmse = rmse(m.prediction, data.test.outputs);
    const MnlpResult nl = mnlp(m.prediction, data.test.outputs);
    out.metrics.mnlp = nl.value;
    out.metrics.floored_variance_count = nl.floored;
  } else {
    out.metrics.rmse = out.metrics.mnlp = std::numeric_limits<double>::quiet_NaN();
  }

  out.row.method = std::string(method_name(config.method));
  out.row.n_train = data.train.size();
  out.row.machines = config.machines;
  out.row.param = uses_support_set(config.method) ? *config.support_size
                  : uses_rank(config.method)      ? *config.rank
                                                  : 0;
  out.row.rmse = out.metrics.rmse;
  out.row.mnlp = out.metrics.mnlp;
  out.row.seconds = m.seconds;
  out.row.negative_variances = out.metrics.negative_variance_count;
  out.prediction = std::move(m.prediction);
  return out;
}

std::string csv_header() { return "method,n_train,machines,param,rmse,mnlp,time,neg_var_count"; }

std::string format_row(const ResultRow& r) {
  char time[32];
  std::snprintf(time, sizeof time, "%.6f", r.seconds);
  return r.method + ',' + std::to_string(r.n_train) + ',' + std::to_string(r.machines) + ',' +
         std::to_string(r.param) + ',' + number(r.rmse) + ',' + number(r.mnlp) + ',' + time + ',' +
         std::to_string(r.negative_variances);
}

SweepSpec parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size())
    throw ConfigError("sweep: expected KEY=v1,v2,... but got '" + std::string(text) + "'");
  SweepSpec out;
  out.key = std::string(text.substr(0, eq));
  std::string_view rest = text.substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view v = rest.substr(0, comma);
    if (v.empty()) throw ConfigError("sweep: empty value in '" + std::string(text) + "'");
    out.values.emplace_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<ExperimentResult> run_sweep(const RunConfig& base, const SweepSpec& sweep) {
  std::vector<RunConfig> configs;
  for (const auto& v : sweep.values) {
    RunConfig c = base;
    apply_setting(c, sweep.key, v);
    c.validate();
    configs.push_back(std::move(c));
  }
  std::vector<ExperimentResult> out;
  for (const auto& c : configs) out.push_back(run_experiment(c));
  return out;
}

std::vector<std::string> speedup_report(std::span<const ResultRow> rows) {
  std::vector<std::string> out;
  for (const auto& par : rows) {
    const auto central = centralized_counterpart(parse_method(par.method));
    if (!central) continue;
    for (const auto& c : rows) {
      if (c.method != method_name(*central) || c.n_train != par.n_train || c.param != par.param ||
          c.machines != par.machines)
        continue;
      out.push_back("speedup." + par.method + ".n" + std::to_string(par.n_train) + ".m" +
                    std::to_string(par.machines) + ".p" + std::to_string(par.param) + " = " +
                    number(par.seconds > 0.0 ? c.seconds / par.seconds : 0.0));
      break;
    }
  }
  return out;
}

}  // namespace pargp::eval
