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

#include "cvsym/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "cvsym/distance.hpp"
#include "cvsym/errors.hpp"

namespace cvsym {

std::vector<TripleSample> triple_reduce(const SampleBatch& batch) {
  if (batch.x.size() != batch.y.size() || batch.x.size() % 2 != 0) {
    throw InvalidDimension("triple_reduce needs a valid batch");
  }
  const auto& x = batch.x;
  const auto& y = batch.y;
  std::vector<TripleSample> out(batch.modes());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto q = static_cast<Eigen::Index>(2 * k);
    out[k] = {x(q) * x(q) + x(q + 1) * x(q + 1), y(q) * y(q) + y(q + 1) * y(q + 1),
              x(q) * y(q) + x(q + 1) * y(q + 1)};
  }
  return out;
}

void MomentAccumulator::add(const Eigen::Vector3d& v) {
  ++count_;
  const Eigen::Vector3d delta = v - mean_;
  mean_ += delta / static_cast<double>(count_);
  comoment_ += delta * (v - mean_).transpose();
  cube_sum_ += std::pow(v.squaredNorm(), 1.5);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Eigen::Vector3d delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  comoment_ += other.comoment_ + delta * delta.transpose() * (na * nb / n);
  cube_sum_ += other.cube_sum_;
  count_ += other.count_;
}

MomentSummary MomentAccumulator::summary() const {
  MomentSummary s;
  s.count = count_;
  if (count_ == 0) return s;
  const double n = static_cast<double>(count_);
  s.mean = mean_;
  s.covariance = comoment_ / n;
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose()).eval();
  s.second_moment = s.covariance + mean_ * mean_.transpose();
  s.third_abs = cube_sum_ / n;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(s.covariance, Eigen::EigenvaluesOnly);
  s.lambda_min = std::max(0.0, eig.eigenvalues().minCoeff());
  return s;
}

MomentSummary summarize(std::span<const TripleSample> triples) {
  MomentAccumulator acc;
  for (const auto& t : triples) acc.add(t.vec());
  return acc.summary();
}

MomentSummary summarize(std::span<const Eigen::Vector3d> vs) {
  MomentAccumulator acc;
  for (const auto& v : vs) acc.add(v);
  return acc.summary();
}

GaussianLimitMatrix sigma_g(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("sigma_g: <x^2> and <y^2> must be positive");
  if (c * c > a * b * (1.0 + 1e-12)) {
    throw DomainError("sigma_g: <xy>^2 exceeds <x^2><y^2>");
  }
  GaussianLimitMatrix g;
  const double cross = a * b + 2.0 * c * c;
  g.uncentered << 3 * a * a, cross, 3 * a * c,
                  cross, 3 * b * b, 3 * b * c,
                  3 * a * c, 3 * b * c, cross;
  g.mean << a, b, c;
  return g;
}

Eigen::Matrix3d fourth_moment_matrix(double x, double y) {
  const double x2 = x * x, y2 = y * y;
  Eigen::Matrix3d m;
  m << x2 * x2, x2 * y2, x2 * x * y,
       x2 * y2, y2 * y2, x * y2 * y,
       x2 * x * y, x * y2 * y, x2 * y2;
  return m;
}

SigmaEstimate sigma_est(std::span<const double> x, std::span<const double> y,
                        std::span<const std::size_t> indices) {
  if (x.size() != y.size()) throw InvalidDimension("sigma_est: x and y differ in length");
  if (indices.size() < 2) throw PreconditionError("sigma_est needs m >= 2 samples");
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (std::size_t i : indices) {
    if (i >= x.size()) throw InvalidDimension("sigma_est: index out of range");
    sum += fourth_moment_matrix(x[i], y[i]);
  }
  const double m = static_cast<double>(indices.size());
  SigmaEstimate est;
  est.m = indices.size();
  est.value = sum / m;
  Eigen::Matrix3d ss = Eigen::Matrix3d::Zero();
  for (std::size_t i : indices) {
    const Eigen::Matrix3d d = fourth_moment_matrix(x[i], y[i]) - est.value;
    ss += d.cwiseProduct(d);
  }
  est.std_error = (ss / (m - 1.0)).cwiseSqrt() / std::sqrt(m);
  return est;
}

std::vector<std::size_t> choose_indices(std::size_t total, std::size_t m, Rng& rng) {
  if (m > total) throw PreconditionError("cannot choose more indices than available");
  // Floyd's algorithm.
  std::unordered_set<std::size_t> picked;
  picked.reserve(m);
  for (std::size_t j = total - m; j < total; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    if (!picked.insert(t).second) picked.insert(j);
  }
  std::vector<std::size_t> out(picked.begin(), picked.end());
  std::sort(out.begin(), out.end());
  return out;
}

double berry_esseen_bound(const MomentSummary& summary, std::size_t n, double c) {
  if (n == 0) throw PreconditionError("berry_esseen_bound: n must be at least 1");
  if (!(summary.lambda_min > 0.0)) {
    throw DegenerateError("berry_esseen_bound: covariance has lambda_min <= 0");
  }
  return c * std::sqrt(3.0) * std::pow(summary.lambda_min, -1.5) * summary.third_abs /
         std::sqrt(static_cast<double>(n));
}

double gaussian_tv_1d(double s1, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw DomainError("gaussian_tv_1d: sigmas must be positive");
  if (s1 == s2) return 0.0;
  if (s1 > s2) std::swap(s1, s2);
  const double gap = s2 - s1;
  const double k = std::sqrt(std::log1p(gap / s1) / (gap * (s2 + s1)));
  return 2.0 * std::erf(s2 * k) - 2.0 * std::erf(s1 * k);
}

double gaussian_tv_1d_first_order(double s1, double delta) {
  if (!(s1 > 0.0)) throw DomainError("gaussian_tv_1d_first_order: sigma must be positive");
  return delta * std::sqrt(8.0 / (std::numbers::e * std::numbers::pi * s1 * s1));
}

EstimationErrorReport estimation_error_mc(const PairSampler& sampler,
                                          const Eigen::Matrix3d& reference, std::size_t m,
                                          std::size_t trials, std::uint64_t seed,
                                          unsigned workers) {
  if (m < 10) throw PreconditionError("estimation_error_mc needs m >= 10");
  if (trials < 2) throw PreconditionError("estimation_error_mc needs at least two trials");
  static constexpr std::array<std::pair<int, int>, 6> kEntries{
      {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};
  static const std::array<const char*, 6> kNames{"x4", "x2y2", "x3y", "y4", "xy3", "x2y2_diag"};

  std::vector<std::array<double, 6>> scaled(trials);
  const double root_m = std::sqrt(static_cast<double>(m));
  parallel_for(trials, workers, [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    std::vector<double> x, y;
    sampler(m, rng, x, y);
    if (x.size() != m || y.size() != m) throw InvalidDimension("pair sampler returned wrong size");
    Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < m; ++i) sum += fourth_moment_matrix(x[i], y[i]);
    const Eigen::Matrix3d err = sum / static_cast<double>(m) - reference;
    for (std::size_t e = 0; e < kEntries.size(); ++e) {
      scaled[t][e] = root_m * err(kEntries[e].first, kEntries[e].second);
    }
  });

  EstimationErrorReport rep;
  rep.m = m;
  rep.trials = trials;
  std::vector<double> col(trials);
  for (std::size_t e = 0; e < kEntries.size(); ++e) {
    for (std::size_t t = 0; t < trials; ++t) col[t] = scaled[t][e];
    const SampleShape s = sample_shape(col);
    EntryError ee;
    ee.entry = kNames[e];
    ee.mean = s.mean;
    ee.std_dev = std::sqrt(s.variance * static_cast<double>(trials) / static_cast<double>(trials - 1));
    ee.mean_se = ee.std_dev / std::sqrt(static_cast<double>(trials));
    ee.unscaled_std = ee.std_dev / root_m;
    ee.skewness = s.skewness;
    ee.excess_kurtosis = s.excess_kurtosis;
    rep.entries.push_back(ee);
  }
  return rep;
}

}  // namespace cvsym
