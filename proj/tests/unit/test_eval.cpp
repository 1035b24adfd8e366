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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pargp/errors.hpp"
#include "pargp/eval/config.hpp"
#include "pargp/eval/dataset_io.hpp"
#include "pargp/eval/experiment.hpp"
#include "pargp/eval/metrics.hpp"
#include "pargp/eval/synthetic.hpp"

using namespace pargp;
using namespace pargp::eval;

namespace {

PredictiveDistribution pd(Vector mean, Vector var) {
  PredictiveDistribution p;
  p.mean = std::move(mean);
  p.variances = std::move(var);
  return p;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double brute_rmse(const Vector& mu, const Vector& y) {
  long double s = 0;
  for (Index i = 0; i < y.size(); ++i) s += (long double)(y[i] - mu[i]) * (y[i] - mu[i]);
  return std::sqrt(static_cast<double>(s / y.size()));
}

double brute_mnlp(const Vector& mu, const Vector& var, const Vector& y) {
  long double s = 0;
  for (Index i = 0; i < y.size(); ++i) {
    const double v = var[i] >= 1e-12 ? var[i] : 1e-12;
    s += (y[i] - mu[i]) * (y[i] - mu[i]) / v + std::log(2.0 * std::numbers::pi * v);
  }
  return static_cast<double>(0.5L * s / y.size());
}

RunConfig tiny(Method m) {
  RunConfig c;
  c.method = m;
  c.synthetic = SyntheticSpec{2, 120, 30};
  c.seed = 4;
  c.length_scales = {1.5, 1.5};
  return c;
}

}  // namespace

TEST_CASE("rmse: examples and errors") {
  CHECK(rmse(pd(vec({1, 2}), vec({1, 1})), vec({1, 2})) == 0.0);
  CHECK(rmse(pd(vec({0, 0}), vec({1, 1})), vec({1, -1})) == 1.0);
  CHECK(std::abs(rmse(pd(vec({0, 0}), vec({1, 1})), vec({3, 4})) - 3.535534) <= 1e-6);
  CHECK(rmse(pd(vec({0, 0}), vec({1, 1})), vec({3, 4})) == std::sqrt(12.5));
  CHECK_THROWS_AS(rmse(pd(vec({0}), vec({1})), vec({1, 2})), DimensionError);
  CHECK_THROWS(rmse(pd(Vector(), Vector()), Vector()));
}

TEST_CASE("mnlp: examples and the variance floor") {
  const double v = 1.0 / (2.0 * std::numbers::pi);
  CHECK(std::abs(mnlp(pd(vec({1, 2}), vec({v, v})), vec({1, 2})).value) <= 1e-15);
  const auto one = mnlp(pd(vec({0.5}), vec({1})), vec({0.5}));
  CHECK(std::abs(one.value - 0.918939) <= 1e-6);
  CHECK(one.value == 0.5 * std::log(2.0 * std::numbers::pi));
  CHECK(one.floored == 0);

  const auto neg = mnlp(pd(vec({0, 0, 0}), vec({-0.5, 0.0, 1.0})), vec({0, 0, 0}));
  CHECK(neg.floored == 2);
  const double expect = 0.5 * (2 * std::log(2 * std::numbers::pi * 1e-12) + std::log(2 * std::numbers::pi)) / 3;
  CHECK(std::abs(neg.value - expect) <= 1e-12);
  CHECK(negative_variance_count(pd(vec({0, 0, 0}), vec({-0.5, 0.0, 1.0}))) == 1);
  CHECK_THROWS_AS(mnlp(pd(vec({0}), vec({1})), vec({1, 2})), DimensionError);
}

TEST_CASE("metrics: agree with brute force on random vectors") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> len(1, 50);
  for (int t = 0; t < 100; ++t) {
    const Index n = len(rng);
    Vector mu(n), var(n), y(n);
    for (Index i = 0; i < n; ++i) {
      mu[i] = z(rng);
      y[i] = z(rng);
      var[i] = t % 4 == 0 ? z(rng) : std::exp(z(rng));
    }
    const auto p = pd(mu, var);
    CHECK(std::abs(rmse(p, y) - brute_rmse(mu, y)) <= 1e-12);
    CHECK(std::abs(mnlp(p, y).value - brute_mnlp(mu, var, y)) <= 1e-12 * std::max(1.0, std::abs(brute_mnlp(mu, var, y))));
  }
}

TEST_CASE("synthetic: determinism, ids and ranges") {
  const auto h = oracle::hyper(2, 1.0, 0.1, 1.0);
  const auto a = generate_synthetic(2, 50, 10, h, 8);
  const auto b = generate_synthetic(2, 50, 10, h, 8);
  CHECK(a.train.outputs.cwiseEqual(b.train.outputs).all());
  CHECK(a.test.outputs.cwiseEqual(b.test.outputs).all());
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(a.train.inputs[i].coords == b.train.inputs[i].coords);
    CHECK(a.train.inputs[i].id == static_cast<PointId>(i));
    for (double x : a.train.inputs[i].coords) CHECK((x >= 0.0 && x <= 10.0));
  }
  CHECK(a.test.inputs.front().id == 50);
  const auto c = generate_synthetic(2, 50, 10, h, 9);
  CHECK_FALSE(c.train.outputs.cwiseEqual(a.train.outputs).all());
  CHECK_THROWS(generate_synthetic(2, 4000, 97, h, 1));
}

TEST_CASE("synthetic: zero signal leaves prior mean plus white noise") {
  auto h = oracle::hyper(1, 1.0, 0.25, 1.0);
  h.signal_variance = 0.0;
  const auto d = generate_synthetic(1, 2000, 10, h, 3, 5.0);
  const Vector& y = d.train.outputs;
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1);
  CHECK(std::abs(mean - 5.0) <= 4 * std::sqrt(0.25 / 2000));
  CHECK(std::abs(var - 0.25) <= 0.25 * 0.15);
  // Neighbouring outputs are uncorrelated.
  double lag = 0;
  for (Index i = 1; i < y.size(); ++i) lag += (y[i] - mean) * (y[i - 1] - mean);
  CHECK(std::abs(lag / (y.size() - 1) / var) <= 0.1);
}

TEST_CASE("synthetic: empirical output variance near signal plus noise") {
  const auto h = oracle::hyper(2, 1.0, 0.1, 1.0);
  std::vector<double> ratio;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = generate_synthetic(2, 2048, 1, h, seed);
    const Vector& y = d.train.outputs;
    const double mean = y.mean();
    ratio.push_back((y.array() - mean).square().sum() / static_cast<double>(y.size() - 1) / 1.1);
  }
  std::nth_element(ratio.begin(), ratio.begin() + 2, ratio.end());
  CHECK(std::abs(ratio[2] - 1.0) <= 0.2);
}

TEST_CASE("synthetic: tiles beyond the cap") {
  const auto h = oracle::hyper(1, 1.0, 0.1, 1.0);
  const auto d = generate_synthetic_tiled(1, 5000, 500, h, 2);
  CHECK(d.train.size() == 5000);
  CHECK(d.test.size() == 500);
  d.train.validate();
  CHECK(d.test.inputs.front().id == 5000);
  const auto small = generate_synthetic_tiled(1, 100, 10, h, 2);
  const auto direct = generate_synthetic(1, 100, 10, h, 2);
  CHECK(small.train.outputs.size() == direct.train.outputs.size());
}

TEST_CASE("config: parsing, defaults and field errors") {
  RunConfig c;
  parse_config(c, "# comment\nmethod = ppic\nmachines=4\nsupport_size = 32  # trailing\n"
                  "length_scales = 1.0, 2.0\nsynthetic = 2,100,20\ntransport = processes\n");
  CHECK(c.method == Method::kPpic);
  CHECK(c.machines == 4);
  CHECK(c.support_size == 32u);
  CHECK(c.length_scales == std::vector<double>{1.0, 2.0});
  CHECK(c.synthetic->n_test == 20);
  CHECK(c.transport == runtime::TransportKind::kProcesses);
  CHECK(c.hyperparameters(2).length_scales == std::vector<double>{1.0, 2.0});
  c.validate();

  RunConfig d;
  CHECK(d.hyperparameters(3).length_scales == std::vector<double>(3, 1.0));

  auto error_names = [](RunConfig cfg, const std::string& field) {
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      return std::string(e.what()).rfind(field, 0) == 0;
    }
    return false;
  };
  RunConfig bad = c;
  bad.support_size.reset();
  CHECK(error_names(bad, "support_size"));
  bad = c;
  bad.machines = 0;
  CHECK(error_names(bad, "machines"));
  bad = c;
  bad.method = Method::kPicf;
  CHECK(error_names(bad, "rank"));
  bad = c;
  bad.synthetic.reset();
  CHECK(error_names(bad, "train"));

  RunConfig e;
  CHECK_THROWS_AS(apply_setting(e, "machines", "two"), ConfigError);
  CHECK_THROWS_AS(apply_setting(e, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(apply_setting(e, "method", "svgp"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(e, "machines\n"), ConfigError);
  CHECK_THROWS_AS(load_config(e, "/nonexistent/pargp.cfg"), ConfigError);
}

TEST_CASE("dataset_io: round trip and malformed input") {
  std::mt19937_64 rng(2);
  const Dataset d = oracle::random_dataset(7, 3, rng, 0);
  std::stringstream buf;
  write_csv(buf, d);
  const auto back = read_csv(buf, 0);
  REQUIRE(back.outputs);
  CHECK(back.outputs->cwiseEqual(d.outputs).all());
  for (std::size_t i = 0; i < 7; ++i) CHECK(back.inputs[i].coords == d.inputs[i].coords);

  std::istringstream no_y("x1,x2\n1,2\n3,4\n");
  const auto t = read_csv(no_y, 10);
  CHECK_FALSE(t.outputs);
  CHECK(t.inputs[1].id == 11);

  std::istringstream ragged("x1,x2,y\n1,2,3\n4,5\n");
  CHECK_THROWS_AS(read_csv(ragged, 0), ConfigError);
  std::istringstream junk("x1,y\n1,abc\n");
  CHECK_THROWS_AS(read_csv(junk, 0), ConfigError);
  std::istringstream header("a,b\n1,2\n");
  CHECK_THROWS_AS(read_csv(header, 0), ConfigError);
}

TEST_CASE("run_experiment: full GP on tiny data") {
  const auto r = run_experiment(tiny(Method::kFgp));
  CHECK(std::isfinite(r.metrics.rmse));
  CHECK(std::isfinite(r.metrics.mnlp));
  CHECK(r.metrics.negative_variance_count == 0);
  CHECK(r.row.method == "fgp");
  CHECK(r.row.n_train == 120);
  CHECK(r.row.param == 0);
}

TEST_CASE("run_experiment: pPIC with one machine matches the full GP, pPITC its centralized form") {
  auto fgp = run_experiment(tiny(Method::kFgp));
  auto c = tiny(Method::kPpic);
  c.support_size = 16;
  const auto ppic = run_experiment(c);
  CHECK(std::abs(ppic.metrics.rmse - fgp.metrics.rmse) <= 1e-6);
  CHECK(std::abs(ppic.metrics.mnlp - fgp.metrics.mnlp) <= 1e-6);

  c.method = Method::kPpitc;
  c.machines = 3;
  const auto ppitc = run_experiment(c);
  c.method = Method::kPitc;
  const auto pitc = run_experiment(c);
  CHECK(std::abs(ppitc.metrics.rmse - pitc.metrics.rmse) <= 1e-8);
  CHECK(std::abs(ppitc.metrics.mnlp - pitc.metrics.mnlp) <= 1e-8);
  CHECK(ppitc.metrics.ledger.messages(runtime::MessageKind::kPitcLocalSummary) == 3);
}

TEST_CASE("run_experiment: pICF and ICF agree, with a rank in the row") {
  auto c = tiny(Method::kPicf);
  c.rank = 20;
  c.machines = 4;
  const auto a = run_experiment(c);
  c.method = Method::kIcf;
  const auto b = run_experiment(c);
  CHECK(std::abs(a.metrics.rmse - b.metrics.rmse) <= 1e-8);
  CHECK(a.row.param == 20);
}

TEST_CASE("run_sweep: rows in sweep order and reproducible CSV") {
  auto c = tiny(Method::kPpitc);
  c.machines = 2;
  const auto sweep = parse_sweep("support_size=16,32,64");
  const auto rows = run_sweep(c, sweep);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].row.param == 16);
  CHECK(rows[1].row.param == 32);
  CHECK(rows[2].row.param == 64);

  auto strip_time = [](const ResultRow& r) {
    ResultRow x = r;
    x.seconds = 0.0;
    return format_row(x);
  };
  const auto again = run_sweep(c, sweep);
  for (std::size_t i = 0; i < 3; ++i) CHECK(strip_time(rows[i].row) == strip_time(again[i].row));

  CHECK_THROWS_AS(parse_sweep("support_size"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("support_size=16,,32"), ConfigError);
  CHECK_THROWS(run_sweep(c, parse_sweep("machines=1,0")));
}

TEST_CASE("format_row and speedup_report") {
  CHECK(csv_header() == "method,n_train,machines,param,rmse,mnlp,time,neg_var_count");
  const ResultRow par{"ppitc", 100, 4, 16, 0.25, -0.5, 0.5, 0};
  CHECK(format_row(par) == "ppitc,100,4,16,0.25,-0.5,0.500000,0");
  const ResultRow central{"pitc", 100, 4, 16, 0.25, -0.5, 2.0, 0};
  const ResultRow other{"pitc", 100, 4, 32, 0.25, -0.5, 9.0, 0};
  const std::vector<ResultRow> rows{par, other, central};
  const auto lines = speedup_report(rows);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] == "speedup.ppitc.n100.m4.p16 = 4");
  CHECK(speedup_report(std::vector<ResultRow>{par}).empty());
}

TEST_CASE("load_data: seeded split of a single file and a train/test pair") {
  const auto dir = std::filesystem::temp_directory_path() / "pargp_eval_test";
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(6);
  const Dataset d = oracle::random_dataset(40, 2, rng, 0);
  {
    std::ofstream f(dir / "train.csv");
    write_csv(f, d);
    std::ofstream g(dir / "test.csv");
    g << "x1,x2\n0.5,0.5\n1.5,2.5\n";
  }
  RunConfig c;
  c.train_path = (dir / "train.csv").string();
  const auto split = load_data(c);
  CHECK(split.test.size() == 4);
  CHECK(split.train.size() == 36);
  const auto split2 = load_data(c);
  CHECK(split.test.outputs.cwiseEqual(split2.test.outputs).all());

  c.test_path = (dir / "test.csv").string();
  const auto pair = load_data(c);
  CHECK(pair.train.size() == 40);
  CHECK(pair.test.size() == 2);
  CHECK_FALSE(pair.test_has_truth);
  CHECK(pair.test.inputs.front().id == 40);
  std::filesystem::remove_all(dir);
}
