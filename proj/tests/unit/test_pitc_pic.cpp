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
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pargp/exact_gp.hpp"
#include "pargp/pitc_pic.hpp"

using namespace pargp;

namespace {

struct Problem {
  Hyperparameters h;
  Dataset train;
  PointList query;
  PointList support;
};

Problem make_problem(std::uint64_t seed, std::size_t n, std::size_t u, std::size_t s, double mu = 0.0) {
  std::mt19937_64 rng(seed);
  Problem p;
  p.h = oracle::hyper(2, 1.0, 0.1, 1.5);
  p.train = oracle::random_dataset(n, 2, rng, 0, mu);
  p.query = oracle::random_points(u, 2, rng, 10000);
  p.support = oracle::random_points(s, 2, rng, 20000);
  return p;
}

bool is_psd(const Matrix& a, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace

TEST_CASE("local_summary: zero residuals give a zero y_dot") {
  auto p = make_problem(1, 20, 4, 5, 2.5);
  p.train.outputs.setConstant(2.5);
  const SupportSet s(p.support, p.h);
  const auto l = local_summary(p.train, s, p.h);
  CHECK(l.y_dot.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("local_summary: scalar hand evaluation") {
  const auto h = oracle::hyper(1, 1.0, 0.2, 1.0);
  Dataset block;
  block.inputs = {InputPoint{{0.0}, 0}};
  block.outputs = Vector::Constant(1, 1.5);
  block.prior_mean = 0.5;
  const SupportSet s(PointList{InputPoint{{0.7}, 1}}, h);
  const double sd = std::exp(-0.5 * 0.49);
  const double ss = 1.2, dd = 1.2;
  const double dd_s = dd - sd * sd / ss;
  const auto l = local_summary(block, s, h);
  CHECK(std::abs(l.y_dot[0] - sd * 1.0 / dd_s) <= 1e-14);
  CHECK(std::abs(l.sigma_dot(0, 0) - sd * sd / dd_s) <= 1e-14);
}

TEST_CASE("local_summary: symmetric PSD sigma_dot and agreement with the dense formula") {
  const auto p = make_problem(2, 30, 4, 8, 0.3);
  const SupportSet s(p.support, p.h);
  const auto l = local_summary(p.train, s, p.h);
  CHECK(l.sigma_dot == l.sigma_dot.transpose());
  CHECK(is_psd(l.sigma_dot, 1e-9));

  const Matrix kss_inv = oracle::inv(oracle::k(p.support, p.support, p.h));
  const Matrix ksd = oracle::k(p.support, p.train.inputs, p.h);
  const Matrix cond = oracle::k(p.train.inputs, p.train.inputs, p.h) - ksd.transpose() * kss_inv * ksd;
  const Matrix cinv = oracle::inv(cond);
  const Vector r = p.train.outputs.array() - 0.3;
  CHECK(oracle::max_abs_diff(l.y_dot, Vector(ksd * cinv * r)) <= 1e-9);
  CHECK(oracle::max_abs_diff(l.sigma_dot, Matrix(ksd * cinv * ksd.transpose())) <= 1e-9);
}

TEST_CASE("local_summary: an empty block contributes nothing") {
  const auto p = make_problem(3, 10, 2, 4);
  const SupportSet s(p.support, p.h);
  const auto l = local_summary(Dataset{}, s, p.h);
  CHECK(l.y_dot.size() == 4);
  CHECK(l.y_dot.isZero(0.0));
  CHECK(l.sigma_dot.isZero(0.0));
}

TEST_CASE("global_summary: degenerate, additive and order-insensitive") {
  const auto p = make_problem(4, 40, 4, 6);
  const SupportSet s(p.support, p.h);

  const auto none = global_summary({}, s, p.h);
  CHECK(none.y_ddot.isZero(0.0));
  CHECK(none.sigma_ddot == s.cov());

  const auto part = partition_even(p.train, p.query, 4);
  std::vector<PitcLocalSummary> locals;
  for (const auto& b : part.blocks) locals.push_back(local_summary(b.data, s, p.h));

  Dataset quiet = part.blocks[1].data;
  quiet.outputs.setConstant(quiet.prior_mean);
  const std::vector<PitcLocalSummary> pair{locals[0], local_summary(quiet, s, p.h)};
  CHECK(global_summary(pair, s, p.h).y_ddot == locals[0].y_dot);

  const auto g = global_summary(locals, s, p.h);
  CHECK(is_psd(g.sigma_ddot - s.cov(), 1e-9));
  CHECK(g.sigma_ddot == g.sigma_ddot.transpose());

  std::vector<PitcLocalSummary> shuffled = locals;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto gr = global_summary(shuffled, s, p.h);
  CHECK(oracle::max_abs_diff(g.y_ddot, gr.y_ddot) <= 1e-12);
  CHECK(oracle::max_abs_diff(g.sigma_ddot, gr.sigma_ddot) <= 1e-12);

  // Concatenating two lists equals summing their separate contributions.
  const std::vector<PitcLocalSummary> first(locals.begin(), locals.begin() + 2);
  const std::vector<PitcLocalSummary> second(locals.begin() + 2, locals.end());
  const auto g1 = global_summary(first, s, p.h);
  const auto g2 = global_summary(second, s, p.h);
  CHECK(oracle::max_abs_diff(g.y_ddot, Vector(g1.y_ddot + g2.y_ddot)) <= 1e-12);
  CHECK(oracle::max_abs_diff(g.sigma_ddot, Matrix(g1.sigma_ddot + g2.sigma_ddot - s.cov())) <= 1e-12);

  std::vector<PitcLocalSummary> bad{locals[0]};
  bad[0].y_dot.resize(2);
  CHECK_THROWS(global_summary(bad, s, p.h));
}

TEST_CASE("ppitc_predict_block: zero residuals predict the prior mean") {
  auto p = make_problem(5, 30, 6, 5, -1.0);
  p.train.outputs.setConstant(-1.0);
  const SupportSet s(p.support, p.h);
  const auto part = partition_even(p.train, p.query, 3);
  std::vector<PitcLocalSummary> locals;
  for (const auto& b : part.blocks) locals.push_back(local_summary(b.data, s, p.h));
  const auto g = global_summary(locals, s, p.h);
  const auto out = ppitc_predict_block(p.query, s, g, p.h, -1.0);
  CHECK(oracle::max_abs_diff(out.mean, Vector::Constant(6, -1.0)) == 0.0);
}

TEST_CASE("centralized_pitc agrees with the dense transcription") {
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const auto p = make_problem(seed, 48, 12, 8, 0.4);
    const SupportSet s(p.support, p.h);
    for (std::size_t m : {1u, 3u, 4u}) {
      const auto part = partition_even(p.train, p.query, m);
      const auto got = centralized_pitc(p.train, part, p.query, s, p.h, true);
      const auto want = oracle::pitc(oracle::blocks_of(part), p.query, p.support, p.h, 0.4);
      CHECK(oracle::max_abs_diff(got.mean, want.mean) <= 1e-10);
      CHECK(oracle::max_abs_diff(*got.covariance, want.cov) <= 1e-10);
      CHECK(oracle::max_abs_diff(got.variances, Vector(want.cov.diagonal())) <= 1e-10);
    }
  }
}

TEST_CASE("pPITC blocks reproduce centralized PITC") {
  const auto p = make_problem(20, 256, 40, 32);
  const SupportSet s(p.support, p.h);
  const auto part = partition_even(p.train, p.query, 4);
  std::vector<PitcLocalSummary> locals;
  for (const auto& b : part.blocks) locals.push_back(local_summary(b.data, s, p.h));
  const auto g = global_summary(locals, s, p.h);
  PredictiveDistribution assembled;
  assembled.mean = Vector::Zero(40);
  assembled.variances = Vector::Zero(40);
  for (const auto& qb : part.query_blocks) {
    const auto out = ppitc_predict_block(qb.points, s, g, p.h, 0.0, true);
    CHECK(is_symmetric(*out.covariance, 1e-9));
    detail::scatter_rows(out, qb.source_index, assembled);
  }
  const auto ref = centralized_pitc(p.train, part, p.query, s, p.h);
  CHECK(oracle::max_abs_diff(assembled.mean, ref.mean) <= 1e-8);
  CHECK(oracle::max_abs_diff(assembled.variances, ref.variances) <= 1e-8);
  CHECK(assembled.variances.minCoeff() >= -1e-9);
}

TEST_CASE("centralized_pic: single machine equals the full GP") {
  const auto p = make_problem(30, 40, 10, 6, 1.0);
  const SupportSet s(p.support, p.h);
  const auto part = partition_even(p.train, p.query, 1);
  const auto pic = centralized_pic(p.train, part, p.query, s, p.h);
  const auto fgp = fgp_predict(p.train, p.query, p.h);
  CHECK(oracle::max_abs_diff(pic.mean, fgp.mean) <= 1e-10);
  CHECK(oracle::max_abs_diff(pic.variances, fgp.variances) <= 1e-10);
}

TEST_CASE("centralized_pic: with the low-rank cross blocks everywhere it is PITC") {
  const auto p = make_problem(31, 60, 14, 7);
  const SupportSet s(p.support, p.h);
  const auto part = partition_clustered(p.train, p.query, 3, 8);
  const auto as_pitc = detail::centralized_pic(p.train, part, p.query, s, p.h, true, false);
  const auto pitc = centralized_pitc(p.train, part, p.query, s, p.h, true);
  CHECK(oracle::max_abs_diff(as_pitc.mean, pitc.mean) <= 1e-12);
  CHECK(oracle::max_abs_diff(as_pitc.variances, pitc.variances) <= 1e-12);
}

TEST_CASE("centralized_pic agrees with the dense transcription") {
  for (std::uint64_t seed = 40; seed < 44; ++seed) {
    const auto p = make_problem(seed, 50, 15, 9, -0.2);
    const SupportSet s(p.support, p.h);
    const auto part = partition_clustered(p.train, p.query, 3, seed);
    const auto got = centralized_pic(p.train, part, p.query, s, p.h, true);
    const auto want = oracle::pic(oracle::blocks_of(part), oracle::query_blocks_of(part), p.support, p.h, -0.2);
    CHECK(oracle::max_abs_diff(got.mean, oracle::unstack(want.mean, part, 15)) <= 1e-10);
    CHECK(oracle::max_abs_diff(got.variances, oracle::unstack(Vector(want.cov.diagonal()), part, 15)) <= 1e-10);
  }
}

TEST_CASE("pPIC blocks reproduce centralized PIC, with symmetric covariances") {
  const auto p = make_problem(50, 200, 48, 24, 0.1);
  const SupportSet s(p.support, p.h);
  const auto part = partition_clustered(p.train, p.query, 4, 3);
  std::vector<PitcLocalSummary> locals;
  for (const auto& b : part.blocks) locals.push_back(local_summary(b.data, s, p.h));
  const auto g = global_summary(locals, s, p.h);
  PredictiveDistribution assembled;
  assembled.mean = Vector::Zero(48);
  assembled.variances = Vector::Zero(48);
  const auto ref = centralized_pic(p.train, part, p.query, s, p.h, true);
  for (std::size_t m = 0; m < 4; ++m) {
    const auto& qb = part.query_blocks[m];
    const auto full = ppic_predict_block(part.blocks[m].data, qb.points, s, locals[m], g, p.h, true);
    const auto diag = ppic_predict_block(part.blocks[m].data, qb.points, s, locals[m], g, p.h, false);
    CHECK(is_symmetric(*full.covariance, 1e-9));
    CHECK(oracle::max_abs_diff(full.variances, diag.variances) <= 1e-10);
    for (std::size_t a = 0; a < qb.points.size(); ++a)
      for (std::size_t b = 0; b < qb.points.size(); ++b)
        CHECK(std::abs((*full.covariance)(static_cast<Index>(a), static_cast<Index>(b)) -
                       (*ref.covariance)(static_cast<Index>(qb.source_index[a]),
                                         static_cast<Index>(qb.source_index[b]))) <= 1e-8);
    detail::scatter_rows(diag, qb.source_index, assembled);
  }
  CHECK(oracle::max_abs_diff(assembled.mean, ref.mean) <= 1e-8);
  CHECK(oracle::max_abs_diff(assembled.variances, ref.variances) <= 1e-8);
  CHECK(assembled.variances.minCoeff() >= -1e-9);
}

TEST_CASE("support set rejects different hyperparameters") {
  const auto p = make_problem(60, 10, 2, 3);
  const SupportSet s(p.support, p.h);
  auto other = p.h;
  other.noise_variance = 0.5;
  CHECK_THROWS(local_summary(p.train, s, other));
  CHECK_THROWS(SupportSet(PointList{}, p.h));
}
