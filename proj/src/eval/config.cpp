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

#include "pargp/eval/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pargp/errors.hpp"

namespace pargp::eval {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError(std::string(key) + ": cannot read '" + std::string(value) + "' as " +
                    std::string(expected));
}

double to_double(std::string_view key, std::string_view value) {
  value = trim(value);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) bad_value(key, value, "a number");
  return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view value) {
  value = trim(value);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
    bad_value(key, value, "a nonnegative integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

std::vector<double> to_list(std::string_view key, std::string_view value) {
  value = trim(value);
  if (!value.empty() && value.front() == '[') {
    if (value.back() != ']') bad_value(key, value, "a list of numbers");
    value = value.substr(1, value.size() - 2);
  }
  std::vector<double> out;
  while (!trim(value).empty()) {
    const auto comma = value.find(',');
    out.push_back(to_double(key, value.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    value = value.substr(comma + 1);
  }
  return out;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kFgp: return "fgp";
    case Method::kPpitc: return "ppitc";
    case Method::kPpic: return "ppic";
    case Method::kPicf: return "picf";
    case Method::kPitc: return "pitc";
    case Method::kPic: return "pic";
    case Method::kIcf: return "icf";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kFgp, Method::kPpitc, Method::kPpic, Method::kPicf, Method::kPitc,
                   Method::kPic, Method::kIcf})
    if (method_name(m) == name) return m;
  throw ConfigError("method: unknown method '" + std::string(name) +
                    "' (expected fgp, ppitc, ppic, picf, pitc, pic or icf)");
}

bool is_parallel(Method m) { return m == Method::kPpitc || m == Method::kPpic || m == Method::kPicf; }

bool uses_support_set(Method m) {
  return m == Method::kPpitc || m == Method::kPpic || m == Method::kPitc || m == Method::kPic;
}

bool uses_rank(Method m) { return m == Method::kPicf || m == Method::kIcf; }

std::optional<Method> centralized_counterpart(Method m) {
  switch (m) {
    case Method::kPpitc: return Method::kPitc;
    case Method::kPpic: return Method::kPic;
    case Method::kPicf: return Method::kIcf;
    default: return std::nullopt;
  }
}

Hyperparameters RunConfig::hyperparameters(std::size_t d) const {
  Hyperparameters h;
  h.signal_variance = signal_variance;
  h.noise_variance = noise_variance;
  h.length_scales = length_scales.empty() ? std::vector<double>(d, 1.0) : length_scales;
  if (h.dim() != d)
    throw ConfigError("length_scales: " + std::to_string(h.dim()) + " values for " + std::to_string(d) +
                      "-dimensional inputs");
  return h;
}

void RunConfig::validate() const {
  if (machines == 0) throw ConfigError("machines: must be at least 1");
  if (uses_support_set(method) && !support_size)
    throw ConfigError("support_size: required by method " + std::string(method_name(method)));
  if (uses_rank(method) && !rank)
    throw ConfigError("rank: required by method " + std::string(method_name(method)));
  if (support_size && *support_size == 0) throw ConfigError("support_size: must be at least 1");
  if (rank && *rank == 0) throw ConfigError("rank: must be at least 1");
  if (!(signal_variance > 0.0)) throw ConfigError("signal_variance: must be positive");
  if (!(noise_variance >= 0.0)) throw ConfigError("noise_variance: must be nonnegative");
  if (uses_rank(method) && !(noise_variance > 0.0))
    throw ConfigError("noise_variance: must be positive for method " + std::string(method_name(method)));
  for (double l : length_scales)
    if (!(l > 0.0)) throw ConfigError("length_scales: every entry must be positive");
  if (support_pool_size == 0) throw ConfigError("support_pool_size: must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction: must lie in (0, 1)");
  if (synthetic && !train_path.empty()) throw ConfigError("synthetic: cannot be combined with train");
  if (!synthetic && train_path.empty()) throw ConfigError("train: no training data (give train or synthetic)");
  if (synthetic && (synthetic->dim == 0 || synthetic->n_train == 0 || synthetic->n_test == 0))
    throw ConfigError("synthetic: dimension and both set sizes must be positive");
  if (!test_path.empty() && train_path.empty()) throw ConfigError("test: given without train");
  if (partition_query && !uses_rank(method))
    throw ConfigError("partition_query: only applies to picf");
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  try {
    if (key == "method") c.method = parse_method(value);
    else if (key == "machines") c.machines = to_unsigned(key, value);
    else if (key == "support_size") c.support_size = to_unsigned(key, value);
    else if (key == "rank") c.rank = to_unsigned(key, value);
    else if (key == "signal_variance") c.signal_variance = to_double(key, value);
    else if (key == "noise_variance") c.noise_variance = to_double(key, value);
    else if (key == "length_scales") c.length_scales = to_list(key, value);
    else if (key == "prior_mean") c.prior_mean = to_double(key, value);
    else if (key == "seed") c.seed = to_unsigned(key, value);
    else if (key == "partition_seed") c.partition_seed = to_unsigned(key, value);
    else if (key == "support_pool_size") c.support_pool_size = to_unsigned(key, value);
    else if (key == "test_fraction") c.test_fraction = to_double(key, value);
    else if (key == "partition") c.partition = runtime::parse_partition(value);
    else if (key == "transport") c.transport = runtime::parse_transport(value);
    else if (key == "full_cov") c.full_cov = to_bool(key, value);
    else if (key == "partition_query") c.partition_query = to_bool(key, value);
    else if (key == "train") c.train_path = std::string(value);
    else if (key == "test") c.test_path = std::string(value);
    else if (key == "out") c.out_path = std::string(value);
    else if (key == "ledger") c.ledger_path = std::string(value);
    else if (key == "synthetic") {
      const auto v = to_list(key, value);
      if (v.size() != 3) bad_value(key, value, "d,n_train,n_test");
      for (double x : v)
        if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x))) bad_value(key, value, "d,n_train,n_test");
      c.synthetic = SyntheticSpec{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]),
                                  static_cast<std::size_t>(v[2])};
    } else {
      throw ConfigError(std::string(key) + ": unknown configuration key");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

void parse_config(RunConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

void load_config(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  parse_config(config, buf.str());
}

}  // namespace pargp::eval
