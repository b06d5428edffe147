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

#include "cvsym/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "cvsym/errors.hpp"
#include "cvsym/random.hpp"

namespace cvsym {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double kolmogorov_pvalue(double d, double effective_n) {
  if (!(effective_n > 0.0)) return 1.0;
  const double sn = std::sqrt(effective_n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // P(K <= lambda) = sqrt(2 pi) / lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))
    const double f = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const double j = 2.0 * k - 1.0;
      cdf += std::exp(j * j * f);
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

KsResult ks_standard_normal(std::vector<double> sample) {
  if (sample.empty()) throw PreconditionError("KS test on an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_pvalue(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("KS test on an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, kolmogorov_pvalue(d, na * nb / (na + nb))};
}

SampleShape sample_shape(std::span<const double> v) {
  SampleShape s;
  if (v.empty()) return s;
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.variance = m2;
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  s.skewness_se = std::sqrt(6.0 / n);
  s.kurtosis_se = std::sqrt(24.0 / n);
  return s;
}

Tv3dReport empirical_tv_3d(std::span<const Eigen::Vector3d> samples, const Eigen::Vector3d& mean,
                           const Eigen::Matrix3d& cov, std::size_t projections,
                           std::uint64_t seed) {
  if (samples.size() < 1000) {
    throw PreconditionError("empirical_tv_3d needs at least 1000 samples");
  }
  Eigen::LLT<Eigen::Matrix3d> llt(cov);
  if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0)) {
    throw DegenerateError("reference covariance is not positive definite");
  }
  const std::size_t n = samples.size();
  const Eigen::Matrix3d l = llt.matrixL();
  std::vector<Eigen::Vector3d> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = l.triangularView<Eigen::Lower>().solve(samples[i] - mean);
  }

  Tv3dReport rep;
  rep.samples = n;
  std::size_t bins = 1;
  while (bins * bins * bins * bins * bins < n) ++bins;
  rep.bins_per_axis = bins;

  const boost::math::normal standard;
  std::vector<double> edges;
  for (std::size_t j = 1; j < bins; ++j) {
    edges.push_back(boost::math::quantile(standard, static_cast<double>(j) / static_cast<double>(bins)));
  }
  std::vector<std::size_t> counts(bins * bins * bins, 0);
  auto bin_of = [&](double v) {
    return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
  };
  for (const auto& v : w) ++counts[(bin_of(v(0)) * bins + bin_of(v(1))) * bins + bin_of(v(2))];

  const double nd = static_cast<double>(n);
  const double cells = static_cast<double>(counts.size());
  double l1 = 0.0;
  for (std::size_t c : counts) l1 += std::abs(static_cast<double>(c) / nd - 1.0 / cells);
  rep.tv = 0.5 * l1;
  rep.bias_bound = 0.5 * std::sqrt(2.0 * cells / (std::numbers::pi * nd)) +
                   4.0 * 0.5 * std::sqrt(1.0 - 2.0 / std::numbers::pi) / std::sqrt(nd);

  std::vector<double> col(n);
  auto note = [&](const KsResult& r) {
    rep.ks_max = std::max(rep.ks_max, r.statistic);
    rep.ks_min_p = std::min(rep.ks_min_p, r.p_value);
  };
  for (int axis = 0; axis < 3; ++axis) {
    for (std::size_t i = 0; i < n; ++i) col[i] = w[i](axis);
    rep.axis_ks.push_back(ks_standard_normal(col));
    note(rep.axis_ks.back());
  }
  Rng rng(derive_seed(seed, 0x70726f6aULL));
  std::normal_distribution<double> normal;
  for (std::size_t p = 0; p < projections; ++p) {
    Eigen::Vector3d u;
    do {
      u = {normal(rng), normal(rng), normal(rng)};
    } while (u.norm() < 1e-8);
    u.normalize();
    for (std::size_t i = 0; i < n; ++i) col[i] = u.dot(w[i]);
    rep.projection_ks.push_back(ks_standard_normal(col));
    note(rep.projection_ks.back());
  }
  return rep;
}

}  // namespace cvsym
