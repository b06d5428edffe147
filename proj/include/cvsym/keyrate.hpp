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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvsym/batch.hpp"

namespace cvsym {

// Channel parameters recovered from paired data. The raw_* fields are the
// plug-in estimators and may leave the physical range through sampling noise
// (e.g. raw_excess_noise < 0 for a clean channel); transmittance and
// excess_noise are the same values clamped to [0, 1] and [0, inf).
struct ChannelEstimate {
  double transmittance = 1.0;
  double excess_noise = 0.0;
  double raw_transmittance = 1.0;
  double raw_excess_noise = 0.0;
  double transmittance_se = 0.0;
  double excess_noise_se = 0.0;
  double v = 1.0;     // V_A + 1
  double beta = 1.0;  // reconciliation efficiency
  std::size_t modes = 0;

  std::vector<std::string> problems() const;
};

inline constexpr std::size_t kMinEstimationModes = 1000;

// T = (<xy>/<x^2>)^2 and xi = 2 (<y^2> - T <x^2> - 1) / T, with moments taken
// over all 2n coordinates. Standard errors use the delta method on the
// coordinate moments; for T the exact variance of a squared normal,
// 4 g^2 s^2 + 2 s^4 with g = <xy>/<x^2>, is used so T = 0 keeps a usable
// error. Throws PreconditionError below kMinEstimationModes modes and
// DegenerateError when <x^2> = 0.
ChannelEstimate estimate_channel(const SampleBatch& batch, double v, double beta);

// 4x4 covariance of the Gaussian-extremal EB state in (q_A, p_A, q_B, p_B):
// [[V I, C Z], [C Z, V_B I]], V_B = T (V - 1 + xi) + 1, C = sqrt(T (V^2 - 1)).
Eigen::Matrix4d eb_covariance(double transmittance, double excess_noise, double v);

// Symplectic spectrum (ascending) from the eigenvalues of i Omega gamma.
// gamma must be 2m x 2m in interleaved ordering.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& gamma);

// Von Neumann entropy of a thermal mode with symplectic eigenvalue nu:
// g((nu - 1) / 2), g(x) = (x + 1) log2(x + 1) - x log2 x.
double thermal_entropy(double nu);

struct KeyRateResult {
  double i_ab = 0.0;
  double chi_be = 0.0;
  double raw_rate = 0.0;  // beta I_AB - chi_BE
  double rate = 0.0;      // max(raw_rate, 0)
  bool no_key = false;
  std::array<double, 3> nu{};  // nu_1, nu_2 of gamma_AB, nu_3 of gamma_A|b
  double chi_numeric = 0.0;    // chi from the numeric spectrum
  double min_symplectic = 0.0;
};

// Heterodyne, reverse reconciliation, collective Gaussian attack:
//   I_AB = log2((T V_A + T xi + 2) / (T xi + 2))
//   chi_BE = G(nu_1) + G(nu_2) - G(nu_3),  nu_3 = V - C^2 / (V_B + 1)
// nu_1,2 come from the closed form over A = V^2 + V_B^2 - 2 C^2 and
// B = V V_B - C^2; chi_numeric recomputes everything from eb_covariance().
// Throws ValidationError when an input lies outside its range.
KeyRateResult gaussian_keyrate(double transmittance, double excess_noise, double v, double beta);
KeyRateResult gaussian_keyrate(const ChannelEstimate& est);

}  // namespace cvsym
