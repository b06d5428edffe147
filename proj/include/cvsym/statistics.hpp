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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvsym/batch.hpp"
#include "cvsym/random.hpp"

namespace cvsym {

// Per-mode (X, Y, Z) = (|alpha_k|^2, |beta_k|^2, Re conj(alpha_k) beta_k) in
// quadrature units: X = x_{2k-1}^2 + x_{2k}^2 and so on.
struct TripleSample {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
};

std::vector<TripleSample> triple_reduce(const SampleBatch& batch);

// First moments, uncentered and centered second moments, E||V||^3 and the
// least covariance eigenvalue of i.i.d. 3-vectors V. Population (1/N)
// normalization throughout, so second_moment - mean mean^T == covariance.
struct MomentSummary {
  std::size_t count = 0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second_moment = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double third_abs = 0.0;
  double lambda_min = 0.0;
};

// Streaming accumulator (Chan et al. pairwise update). merge() is exact up to
// rounding; callers merge in a fixed order for reproducible output.
class MomentAccumulator {
 public:
  void add(const Eigen::Vector3d& v);
  void merge(const MomentAccumulator& other);
  std::size_t count() const noexcept { return count_; }
  MomentSummary summary() const;

 private:
  std::size_t count_ = 0;
  Eigen::Vector3d mean_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3d comoment_ = Eigen::Matrix3d::Zero();
  double cube_sum_ = 0.0;
};

MomentSummary summarize(std::span<const TripleSample> triples);
MomentSummary summarize(std::span<const Eigen::Vector3d> vs);

// Limit matrix of the (x^2, y^2, xy) statistics for centered bivariate
// Gaussian coordinates with <x^2> = a, <y^2> = b, <xy> = c:
//   [[3a^2,     ab+2c^2, 3ac    ],
//    [ab+2c^2,  3b^2,    3bc    ],
//    [3ac,      3bc,     ab+2c^2]]
// These are uncentered fourth moments; centered() subtracts (a,b,c)(a,b,c)^T.
struct GaussianLimitMatrix {
  Eigen::Matrix3d uncentered = Eigen::Matrix3d::Zero();
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();

  Eigen::Matrix3d centered() const { return uncentered - mean * mean.transpose(); }
};

// Throws DomainError unless a, b > 0 and c^2 <= ab.
GaussianLimitMatrix sigma_g(double a, double b, double c);

// [[x^4, x^2y^2, x^3y], [x^2y^2, y^4, xy^3], [x^3y, xy^3, x^2y^2]] for one pair.
Eigen::Matrix3d fourth_moment_matrix(double x, double y);

struct SigmaEstimate {
  std::size_t m = 0;
  Eigen::Matrix3d value = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d std_error = Eigen::Matrix3d::Zero();  // CLT: sample std / sqrt(m)
};

// Mean of fourth_moment_matrix over the coordinate pairs (x[i], y[i]) for i in
// `indices`. Throws PreconditionError when fewer than two indices are given.
SigmaEstimate sigma_est(std::span<const double> x, std::span<const double> y,
                        std::span<const std::size_t> indices);

// m distinct indices out of [0, total), sorted.
std::vector<std::size_t> choose_indices(std::size_t total, std::size_t m, Rng& rng);

// c sqrt(3) lambda_min^{-3/2} E||V||^3 / sqrt(n). Throws DegenerateError when
// lambda_min <= 0 and PreconditionError when n = 0.
double berry_esseen_bound(const MomentSummary& summary, std::size_t n, double c);

// Integral of |g1 - g2| for centered normals with standard deviations s1, s2:
//   2 erf(s2 k) - 2 erf(s1 k),  k = sqrt(ln(s2/s1) / (s2^2 - s1^2)),
// with the arguments ordered so that s2 >= s1 and 0 when they coincide.
// Throws DomainError for non-positive inputs.
double gaussian_tv_1d(double s1, double s2);

// delta sqrt(8 / (e pi s1^2)), the first-order term of gaussian_tv_1d(s1, s1 + delta).
double gaussian_tv_1d_first_order(double s1, double delta);

// ---------------------------------------------------------------------------
// Estimation error of sigma_est

// Fills x and y with `count` coordinate pairs.
using PairSampler =
    std::function<void(std::size_t count, Rng& rng, std::vector<double>& x, std::vector<double>& y)>;

struct EntryError {
  std::string entry;        // e.g. "x4", "x2y2", "x3y", "y4", "xy3", "x2y2_diag"
  double mean = 0.0;        // of sqrt(m) (est - ref)
  double mean_se = 0.0;
  double std_dev = 0.0;     // of sqrt(m) (est - ref)
  double unscaled_std = 0.0;  // of (est - ref)
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

struct EstimationErrorReport {
  std::size_t m = 0;
  std::size_t trials = 0;
  std::vector<EntryError> entries;  // upper triangle, row major
};

// For each trial draws m pairs, forms sigma_est over all of them and records
// sqrt(m) (sigma_est - reference). Trial i uses the stream (seed, i).
// Throws PreconditionError when m < 10 or trials < 2.
EstimationErrorReport estimation_error_mc(const PairSampler& sampler,
                                          const Eigen::Matrix3d& reference, std::size_t m,
                                          std::size_t trials, std::uint64_t seed,
                                          unsigned workers = 1);

}  // namespace cvsym
