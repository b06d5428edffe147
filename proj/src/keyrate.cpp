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

#include "cvsym/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "cvsym/errors.hpp"

namespace cvsym {

namespace {

std::vector<std::string> rate_problems(double t, double xi, double v, double beta) {
  std::vector<std::string> out;
  if (!(t >= 0.0 && t <= 1.0)) out.emplace_back("transmittance: must lie in [0, 1]");
  if (!(xi >= 0.0) || !std::isfinite(xi)) out.emplace_back("excess_noise: must be >= 0");
  if (!(v >= 1.0) || !std::isfinite(v)) out.emplace_back("v: must be >= 1");
  if (!(beta >= 0.0 && beta <= 1.0)) {
    out.emplace_back("reconciliation_efficiency: must lie in [0, 1]");
  }
  return out;
}

double symplectic_2x2(const Eigen::Matrix2d& m) { return std::sqrt(std::max(0.0, m.determinant())); }

}  // namespace

std::vector<std::string> ChannelEstimate::problems() const {
  return rate_problems(transmittance, excess_noise, v, beta);
}

ChannelEstimate estimate_channel(const SampleBatch& batch, double v, double beta) {
  const std::size_t modes = batch.modes();
  if (modes < kMinEstimationModes) {
    throw PreconditionError("estimate_channel needs at least 1000 modes");
  }
  const Eigen::Index n = batch.x.size();
  const double inv = 1.0 / static_cast<double>(n);
  const Eigen::ArrayXd x = batch.x.array(), y = batch.y.array();
  const Eigen::ArrayXd wxx = x * x, wyy = y * y, wxy = x * y;
  const double mxx = wxx.mean(), myy = wyy.mean(), mxy = wxy.mean();
  if (!(mxx > 0.0)) throw DegenerateError("estimate_channel: <x^2> = 0");

  // Sample covariance of (x^2, y^2, xy), divided by n for the moment means.
  Eigen::MatrixXd w(n, 3);
  w.col(0) = wxx - mxx;
  w.col(1) = wyy - myy;
  w.col(2) = wxy - mxy;
  const Eigen::Matrix3d cov = (w.transpose() * w) * (inv / static_cast<double>(n - 1));

  const double g = mxy / mxx;
  const double t = g * g;
  Eigen::Vector3d dg(-mxy / (mxx * mxx), 0.0, 1.0 / mxx);
  const double var_g = dg.dot(cov * dg);
  const double t_se = std::sqrt(4.0 * g * g * var_g + 2.0 * var_g * var_g);

  double xi = std::numeric_limits<double>::infinity();
  double xi_se = std::numeric_limits<double>::infinity();
  if (mxy != 0.0) {
    const double r = mxx * mxx / (mxy * mxy);
    xi = 2.0 * (myy - 1.0) * r - 2.0 * mxx;
    Eigen::Vector3d dxi(4.0 * (myy - 1.0) * mxx / (mxy * mxy) - 2.0, 2.0 * r,
                        -4.0 * (myy - 1.0) * r / mxy);
    xi_se = std::sqrt(std::max(0.0, dxi.dot(cov * dxi)));
  }

  ChannelEstimate est;
  est.raw_transmittance = t;
  est.raw_excess_noise = xi;
  est.transmittance = std::clamp(t, 0.0, 1.0);
  est.excess_noise = std::isfinite(xi) ? std::max(xi, 0.0) : xi;
  est.transmittance_se = t_se;
  est.excess_noise_se = xi_se;
  est.v = v;
  est.beta = beta;
  est.modes = modes;
  return est;
}

Eigen::Matrix4d eb_covariance(double transmittance, double excess_noise, double v) {
  const double vb = transmittance * (v - 1.0 + excess_noise) + 1.0;
  const double c = std::sqrt(std::max(0.0, transmittance * (v * v - 1.0)));
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 0) = g(1, 1) = v;
  g(2, 2) = g(3, 3) = vb;
  g(0, 2) = g(2, 0) = c;
  g(1, 3) = g(3, 1) = -c;
  return g;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0 || gamma.rows() % 2 != 0) {
    throw InvalidDimension("covariance must be square with even size");
  }
  const Eigen::Index m = gamma.rows() / 2;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(gamma.rows(), gamma.cols());
  for (Eigen::Index k = 0; k < m; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  const Eigen::MatrixXcd a = std::complex<double>(0.0, 1.0) * (omega * gamma).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
  if (solver.info() != Eigen::Success) throw Error("symplectic eigenvalue solve failed");
  // Spectrum is {+nu_k, -nu_k}; keep the positive half.
  std::vector<double> vals;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    vals.push_back(solver.eigenvalues()(i).real());
  }
  std::sort(vals.begin(), vals.end());
  Eigen::VectorXd out(m);
  for (Eigen::Index k = 0; k < m; ++k) out(k) = vals[static_cast<std::size_t>(m + k)];
  return out;
}

double thermal_entropy(double nu) {
  const double x = (nu - 1.0) / 2.0;
  if (x <= 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

KeyRateResult gaussian_keyrate(double transmittance, double excess_noise, double v, double beta) {
  auto bad = rate_problems(transmittance, excess_noise, v, beta);
  if (!bad.empty()) throw ValidationError(std::move(bad));
  const double t = transmittance, xi = excess_noise;
  const double va = v - 1.0;
  const double vb = t * (va + xi) + 1.0;
  const double c2 = t * (v * v - 1.0);

  KeyRateResult r;
  r.i_ab = std::log2((t * va + t * xi + 2.0) / (t * xi + 2.0));

  const double a = v * v + vb * vb - 2.0 * c2;
  const double b = v * vb - c2;
  const double disc = std::sqrt(std::max(0.0, a * a - 4.0 * b * b));
  r.nu[0] = std::sqrt(std::max(0.0, 0.5 * (a + disc)));
  r.nu[1] = std::sqrt(std::max(0.0, 0.5 * (a - disc)));
  r.nu[2] = v - c2 / (vb + 1.0);
  r.chi_be = thermal_entropy(r.nu[0]) + thermal_entropy(r.nu[1]) - thermal_entropy(r.nu[2]);

  const Eigen::Matrix4d gamma = eb_covariance(t, xi, v);
  const Eigen::VectorXd spectrum = symplectic_eigenvalues(gamma);  // ascending
  const Eigen::Matrix2d ga = gamma.topLeftCorner<2, 2>();
  const Eigen::Matrix2d gb = gamma.bottomRightCorner<2, 2>();
  const Eigen::Matrix2d sigma = gamma.topRightCorner<2, 2>();
  const Eigen::Matrix2d cond =
      ga - sigma * (gb + Eigen::Matrix2d::Identity()).inverse() * sigma.transpose();
  const double nu3 = symplectic_2x2(cond);
  r.chi_numeric = thermal_entropy(spectrum(0)) + thermal_entropy(spectrum(1)) - thermal_entropy(nu3);
  r.min_symplectic = std::min({spectrum(0), r.nu[1], r.nu[2], nu3});

  r.raw_rate = beta * r.i_ab - r.chi_be;
  r.no_key = !(r.raw_rate > 0.0);
  r.rate = r.no_key ? 0.0 : r.raw_rate;
  return r;
}

KeyRateResult gaussian_keyrate(const ChannelEstimate& est) {
  return gaussian_keyrate(est.transmittance, est.excess_noise, est.v, est.beta);
}

}  // namespace cvsym
