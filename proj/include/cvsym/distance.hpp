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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvsym {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
// evaluated at (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) d.
double kolmogorov_pvalue(double d, double effective_n);

// One-sample KS against the standard normal. Sorts its argument.
KsResult ks_standard_normal(std::vector<double> sample);
// Two-sample KS.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct SampleShape {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  // Large-sample standard errors under normality: sqrt(6/N), sqrt(24/N).
  double skewness_se = 0.0;
  double kurtosis_se = 0.0;
};

SampleShape sample_shape(std::span<const double> v);

// Histogram TV estimate of 3-D samples against N(mean, cov), plus KS
// diagnostics of the whitened samples along each axis and along random
// unit directions.
struct Tv3dReport {
  std::size_t samples = 0;
  std::size_t bins_per_axis = 0;  // ceil(N^{1/5}), equal reference mass per bin
  double tv = 0.0;                // (1/2) sum_cells |p_hat - p_ref|
  // Expected plug-in noise of the estimator under the null plus four of its
  // standard deviations: sqrt(2 B^3 / (pi N)) / 2 + 4 * sqrt(1 - 2/pi) / (2 sqrt(N)).
  double bias_bound = 0.0;
  std::vector<KsResult> axis_ks;        // 3 entries
  std::vector<KsResult> projection_ks;  // one per random direction
  double ks_max = 0.0;
  double ks_min_p = 1.0;
};

// Throws PreconditionError below 1000 samples and DegenerateError when cov is
// not positive definite.
Tv3dReport empirical_tv_3d(std::span<const Eigen::Vector3d> samples, const Eigen::Vector3d& mean,
                           const Eigen::Matrix3d& cov, std::size_t projections,
                           std::uint64_t seed);

}  // namespace cvsym
