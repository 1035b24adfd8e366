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

// Command-line driver: runs one method (or a sweep) and prints CSV result rows.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pargp/errors.hpp"
#include "pargp/eval/config.hpp"
#include "pargp/eval/experiment.hpp"
#include "pargp/runtime/transport.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Flags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> settings;
  std::optional<std::string> sweep;
};

int run(const Flags& flags) {
  using namespace pargp::eval;
  RunConfig config;
  if (!flags.config_path.empty()) load_config(config, flags.config_path);
  for (const auto& [key, value] : flags.settings) apply_setting(config, key, value);

  std::vector<ExperimentResult> results;
  if (flags.sweep) {
    results = run_sweep(config, parse_sweep(*flags.sweep));
  } else {
    config.validate();
    results.push_back(run_experiment(config));
  }

  std::ofstream file;
  if (!config.out_path.empty()) {
    file.open(config.out_path);
    if (!file) throw pargp::ConfigError("out: cannot write '" + config.out_path + "'");
  }
  std::ostream& out = config.out_path.empty() ? std::cout : file;
  out << csv_header() << '\n';
  std::vector<ResultRow> rows;
  for (const auto& r : results) {
    out << format_row(r.row) << '\n';
    rows.push_back(r.row);
  }

  std::ofstream ledger_file;
  if (!config.ledger_path.empty()) {
    ledger_file.open(config.ledger_path);
    if (!ledger_file) throw pargp::ConfigError("ledger: cannot write '" + config.ledger_path + "'");
  }
  std::ostream& report = config.ledger_path.empty() ? std::cerr : ledger_file;
  for (std::size_t i = 0; i < results.size(); ++i) {
    report << "# run " << i << ' ' << rows[i].method << '\n';
    report << "floored_variances = " << results[i].metrics.floored_variance_count << '\n';
    report << results[i].metrics.ledger.report();
  }
  for (const auto& line : speedup_report(rows)) report << line << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel Gaussian-process regression"};
  Flags flags;
  std::string sweep;

  auto setting = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags.settings.emplace_back(key, v); }, help);
  };
  app.add_option("--config", flags.config_path, "Flat key = value configuration file");
  setting("--method", "method", "fgp, ppitc, ppic, picf, pitc, pic or icf");
  setting("--machines", "machines", "Number of worker machines M");
  setting("--support-size", "support_size", "Support set size for the PITC family");
  setting("--rank", "rank", "Factor rank R for the ICF family");
  setting("--train", "train", "Training CSV (x1..xd,y)");
  setting("--test", "test", "Test CSV (x1..xd[,y])");
  setting("--seed", "seed", "Seed for synthetic data and the test split");
  setting("--partition-seed", "partition_seed", "Seed for cluster centers and support candidates");
  setting("--synthetic", "synthetic", "Draw synthetic data: d,n_train,n_test");
  setting("--partition", "partition", "even or clustered");
  setting("--transport", "transport", "threads or processes");
  setting("--out", "out", "Write result rows here instead of stdout");
  setting("--ledger", "ledger", "Write the ledger report here instead of stderr");
  app.add_flag_callback("--full-cov", [&] { flags.settings.emplace_back("full_cov", "true"); },
                        "Form full predictive covariances");
  app.add_flag_callback("--partition-query", [&] { flags.settings.emplace_back("partition_query", "true"); },
                        "pICF: split the global summary over query slices");
  app.add_option("--sweep", sweep, "Repeat the run for KEY=v1,v2,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (!sweep.empty()) flags.sweep = sweep;

  try {
    return run(flags);
  } catch (const pargp::runtime::WorkerFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.numerical() ? kNumericalError : 1;
  } catch (const pargp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
