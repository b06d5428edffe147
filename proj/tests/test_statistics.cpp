// Copyright 2026 The cvsym Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cvsym/distance.hpp"
#include "cvsym/errors.hpp"
#include "cvsym/statistics.hpp"

using namespace cvsym;

namespace {

// Centered bivariate normal pairs with <x^2> = a, <y^2> = b, <xy> = c.
PairSampler gaussian_pairs(double a, double b, double c) {
  return [=](std::size_t count, Rng& rng, std::vector<double>& x, std::vector<double>& y) {
    std::normal_distribution<double> normal;
    const double l11 = std::sqrt(a), l21 = c / l11, l22 = std::sqrt(std::max(b - l21 * l21, 0.0));
    x.resize(count);
    y.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double g1 = normal(rng), g2 = normal(rng);
      x[i] = l11 * g1;
      y[i] = l21 * g1 + l22 * g2;
    }
  };
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("triple_reduce: per-mode squared norms and overlap") {
  const SampleBatch b = SampleBatch::make(Eigen::Vector4d(1, 2, 0, -1), Eigen::Vector4d(3, 4, 2, 5));
  const auto t = triple_reduce(b);
  REQUIRE(t.size() == 2);
  CHECK(t[0].x == 5);
  CHECK(t[0].y == 25);
  CHECK(t[0].z == 11);
  CHECK(t[1].x == 1);
  CHECK(t[1].y == 29);
  CHECK(t[1].z == -5);
}

TEST_CASE("MomentAccumulator: merge agrees with a single pass") {
  Rng rng(21);
  std::normal_distribution<double> normal;
  std::vector<Eigen::Vector3d> v(3001);
  for (auto& e : v) e = {normal(rng), 2 + normal(rng), normal(rng) * normal(rng)};
  MomentAccumulator whole, left, right;
  for (std::size_t i = 0; i < v.size(); ++i) {
    whole.add(v[i]);
    (i < 1234 ? left : right).add(v[i]);
  }
  left.merge(right);
  const MomentSummary a = whole.summary(), b = left.summary();
  CHECK(a.count == b.count);
  CHECK((a.mean - b.mean).norm() < 1e-12);
  CHECK((a.covariance - b.covariance).norm() < 1e-12);
  CHECK(a.third_abs == doctest::Approx(b.third_abs));
  CHECK(((a.second_moment - a.mean * a.mean.transpose()) - a.covariance).norm() < 1e-12);
  const MomentSummary c = summarize(v);
  CHECK((c.covariance - a.covariance).norm() < 1e-12);
}

TEST_CASE("sigma_g: closed form") {
  const GaussianLimitMatrix g = sigma_g(1, 1, 0);
  Eigen::Matrix3d want;
  want << 3, 1, 0, 1, 3, 0, 0, 0, 1;
  CHECK((g.uncentered - want).norm() < 1e-15);
  CHECK((g.mean - Eigen::Vector3d(1, 1, 0)).norm() < 1e-15);

  // a = b = c: every statistic equals x^2, so the centered matrix has rank one.
  const Eigen::Matrix3d deg = sigma_g(1, 1, 1).centered();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(deg);
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
  CHECK(std::abs(es.eigenvalues()(1)) < 1e-12);
  CHECK(es.eigenvalues()(2) == doctest::Approx(6.0));

  // Fourth moments scale as the fourth power of the coordinate scale.
  const Eigen::Matrix3d base = sigma_g(2, 1, 0.5).uncentered;
  CHECK((sigma_g(8, 4, 2).uncentered - 16 * base).norm() < 1e-12);

  CHECK_THROWS_AS(sigma_g(1, 1, 2), DomainError);
  CHECK_THROWS_AS(sigma_g(0, 1, 0), DomainError);
}

TEST_CASE("fourth_moment_matrix and sigma_est") {
  Eigen::Matrix3d want;
  want << 1, 4, 2, 4, 16, 8, 2, 8, 4;
  CHECK((fourth_moment_matrix(1, 2) - want).norm() == 0.0);

  const std::vector<double> x{1, 1, 1}, y{2, 2, 2};
  const std::vector<std::size_t> one{0}, two{0, 2};
  CHECK_THROWS_AS(sigma_est(x, y, one), PreconditionError);
  const SigmaEstimate e = sigma_est(x, y, two);
  CHECK(e.m == 2);
  CHECK((e.value - want).norm() == 0.0);
  CHECK(e.std_error.norm() == 0.0);
}

TEST_CASE("sigma_est: Gaussian data matches sigma_g within 3 standard errors") {
  const double cases[3][3] = {{1, 1, 0}, {2, 1, 0.5}, {1, 3, -1}};
  std::uint64_t seed = 30;
  for (const auto& abc : cases) {
    Rng rng(seed++);
    std::vector<double> x, y;
    gaussian_pairs(abc[0], abc[1], abc[2])(100000, rng, x, y);
    const auto idx = all_indices(x.size());
    const SigmaEstimate e = sigma_est(x, y, idx);
    const Eigen::Matrix3d ref = sigma_g(abc[0], abc[1], abc[2]).uncentered;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(std::abs(e.value(i, j) - ref(i, j)) <= 3 * e.std_error(i, j));
  }
}

TEST_CASE("choose_indices: distinct, sorted and in range") {
  Rng rng(40);
  const auto idx = choose_indices(100, 30, rng);
  REQUIRE(idx.size() == 30);
  for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i - 1] < idx[i]);
  CHECK(idx.back() < 100);
  CHECK(choose_indices(5, 5, rng) == all_indices(5));
  CHECK_THROWS(choose_indices(5, 6, rng));
}

TEST_CASE("berry_esseen_bound: scaling and composition") {
  MomentSummary s;
  s.count = 10;
  s.third_abs = 8.0;
  s.lambda_min = 0.25;
  const double b = berry_esseen_bound(s, 100, 1.0);
  CHECK(b == doctest::Approx(std::sqrt(3.0) * std::pow(0.25, -1.5) * 8.0 / 10.0));
  CHECK(berry_esseen_bound(s, 400, 1.0) == doctest::Approx(b / 2));
  CHECK(berry_esseen_bound(s, 100, 0.0) == 0.0);
  CHECK(berry_esseen_bound(s, 100, 2.5) == doctest::Approx(2.5 * b));
  // Rescaling V by t leaves the bound unchanged.
  MomentSummary t = s;
  t.third_abs *= 27.0;
  t.lambda_min *= 9.0;
  CHECK(berry_esseen_bound(t, 100, 1.0) == doctest::Approx(b));
  CHECK_THROWS_AS(berry_esseen_bound(s, 0, 1.0), PreconditionError);
  s.lambda_min = 0.0;
  CHECK_THROWS_AS(berry_esseen_bound(s, 10, 1.0), DegenerateError);
}

TEST_CASE("gaussian_tv_1d: matches quadrature") {
  // Frozen from tools/oracles/tv1d_oracle.py.
  const double grid[][3] = {
      {1, 2, 0.645349137669537},     {1, 1.01, 0.00963067560281756}, {0.5, 3, 1.38822086620702},
      {1, 10, 1.59643188182465},     {2, 2.5, 0.215085455011366},    {0.1, 0.35, 1.07678449667121},
      {1, 1.1, 0.0921793288988144},  {3, 7, 0.774546415349174},
  };
  for (const auto& g : grid) {
    CHECK(std::abs(gaussian_tv_1d(g[0], g[1]) - g[2]) <= 1e-6);
    CHECK(gaussian_tv_1d(g[1], g[0]) == doctest::Approx(gaussian_tv_1d(g[0], g[1])));
  }
  CHECK(gaussian_tv_1d(1.3, 1.3) == 0.0);
  CHECK_THROWS_AS(gaussian_tv_1d(0.0, 1.0), DomainError);
  CHECK(gaussian_tv_1d_first_order(1, 0.01) == doctest::Approx(0.009678828980765735).epsilon(1e-12));
}

TEST_CASE("gaussian_tv_1d: first-order term is asymptotically exact") {
  for (double s1 : {0.5, 1.0, 2.0}) {
    const double delta = 1e-4 * s1;
    const double ratio = gaussian_tv_1d(s1, s1 + delta) / gaussian_tv_1d_first_order(s1, delta);
    CHECK(std::abs(ratio - 1) < 0.01);
  }
  // The error is o(delta): shrinking delta tightens the ratio.
  const double r1 = gaussian_tv_1d(1, 1.01) / gaussian_tv_1d_first_order(1, 0.01);
  const double r2 = gaussian_tv_1d(1, 1.001) / gaussian_tv_1d_first_order(1, 0.001);
  CHECK(std::abs(r2 - 1) < std::abs(r1 - 1));
}

TEST_CASE("KS helpers") {
  CHECK(kolmogorov_pvalue(0.0, 100) == doctest::Approx(1.0));
  CHECK(kolmogorov_pvalue(0.5, 100) < 1e-15);
  Rng rng(50);
  std::normal_distribution<double> normal;
  std::vector<double> a(5000), b(5000), c(5000);
  for (auto& v : a) v = normal(rng);
  for (auto& v : b) v = normal(rng);
  for (auto& v : c) v = normal(rng) + 0.2;
  CHECK(ks_standard_normal(a).p_value > 1e-3);
  CHECK(ks_standard_normal(c).p_value < 1e-6);
  CHECK(ks_two_sample(a, b).p_value > 1e-3);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("sample_shape: moments of a small sample") {
  const std::vector<double> v{1, 2, 3, 4, 10};
  const SampleShape s = sample_shape(v);
  CHECK(s.mean == doctest::Approx(4));
  CHECK(s.variance == doctest::Approx(10));
  // Central moments m3 = 36, m4 = 278.8 (population normalization).
  CHECK(s.skewness == doctest::Approx(36 / std::pow(10.0, 1.5)));
  CHECK(s.excess_kurtosis == doctest::Approx(278.8 / 100 - 3));
  CHECK(s.skewness_se == doctest::Approx(std::sqrt(6.0 / 5)));
}

TEST_CASE("empirical_tv_3d: null samples stay under the bias bound") {
  Rng rng(60);
  std::normal_distribution<double> normal;
  Eigen::Matrix3d cov;
  cov << 2, 0.5, 0, 0.5, 1, 0.2, 0, 0.2, 1;
  const Eigen::Matrix3d l = cov.llt().matrixL();
  const Eigen::Vector3d mean(1, -1, 3);
  std::vector<Eigen::Vector3d> s(100000);
  for (auto& v : s) v = mean + l * Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  const Tv3dReport r = empirical_tv_3d(s, mean, cov, 8, 61);
  CHECK(r.samples == 100000);
  CHECK(r.bins_per_axis == 10);
  CHECK(r.tv <= r.bias_bound);
  CHECK(r.axis_ks.size() == 3);
  CHECK(r.projection_ks.size() == 8);
  CHECK(r.ks_min_p > 1e-3);

  std::vector<Eigen::Vector3d> shifted = s;
  for (auto& v : shifted) v += 5 * Eigen::Vector3d(std::sqrt(cov(0, 0)), 1, 1);
  CHECK(empirical_tv_3d(shifted, mean, cov, 8, 61).tv >= 0.95);

  s.resize(999);
  CHECK_THROWS_AS(empirical_tv_3d(s, mean, cov, 8, 61), PreconditionError);
  s.resize(2000);
  CHECK_THROWS_AS(empirical_tv_3d(s, mean, Eigen::Matrix3d::Zero(), 8, 61), DegenerateError);
}

TEST_CASE("estimation_error_mc: centered, sqrt(m) scaling, deterministic data") {
  const GaussianLimitMatrix g = sigma_g(2, 1, 0.5);
  const auto sampler = gaussian_pairs(2, 1, 0.5);
  const EstimationErrorReport r1 = estimation_error_mc(sampler, g.uncentered, 1000, 10000, 70, 2);
  const EstimationErrorReport r2 = estimation_error_mc(sampler, g.uncentered, 2000, 10000, 71, 2);
  REQUIRE(r1.entries.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(r1.entries[i].mean) <= 3 * r1.entries[i].mean_se);
    const double ratio = r1.entries[i].unscaled_std / r2.entries[i].unscaled_std;
    CHECK(std::abs(ratio / std::sqrt(2.0) - 1) < 0.2);
  }
  // Same seed, different worker count.
  const EstimationErrorReport r3 = estimation_error_mc(sampler, g.uncentered, 1000, 10000, 70, 1);
  CHECK(r3.entries[0].std_dev == r1.entries[0].std_dev);

  const PairSampler constant = [](std::size_t n, Rng&, std::vector<double>& x, std::vector<double>& y) {
    x.assign(n, 1.0);
    y.assign(n, 2.0);
  };
  const EstimationErrorReport z = estimation_error_mc(constant, fourth_moment_matrix(1, 2), 10, 5, 1);
  for (const auto& e : z.entries) {
    CHECK(e.mean == 0.0);
    CHECK(e.std_dev == 0.0);
  }
  CHECK_THROWS_AS(estimation_error_mc(constant, fourth_moment_matrix(1, 2), 9, 5, 1), PreconditionError);
}
