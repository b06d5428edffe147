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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvsym/batch.hpp"
#include "cvsym/random.hpp"

namespace cvsym {

// Units: shot-noise units (SNU), vacuum quadrature variance 1. Data vectors
// hold heterodyne outcomes rescaled by 1/sqrt(2), so for a channel with
// transmittance T and excess noise xi (referred to the channel input):
//
//   x_k ~ N(0, V_A / 2)                      (V_A = V - 1, per quadrature)
//   y_k = sqrt(T) x_k + g_k,  Var(g_k) = 1 + T xi / 2
//
// i.e. Bob's quadrature variance before detection is T V_A + 1 + T xi and
// heterodyne adds one vacuum unit. Every routine in the library uses these
// constants through heterodyne_noise_variance() and coordinate_moments().
inline double heterodyne_noise_variance(double transmittance, double excess_noise) {
  return 1.0 + transmittance * excess_noise / 2.0;
}

struct ModulationParams {
  std::size_t modes = 1;
  double variance_a = 4.0;  // V - 1, per-mode complex-amplitude variance

  std::vector<std::string> problems() const;
};

enum class Perturbation { kNone, kGaussianMixture, kPhaseDiffusion };

std::string to_string(Perturbation p);

struct MixtureComponent {
  double weight = 1.0;
  double transmittance = 1.0;
  double excess_noise = 0.0;

  bool operator==(const MixtureComponent&) const = default;
};

// Gaussian loss + excess-noise core with an optional non-Gaussian
// perturbation. A mixture picks one component per mode (i.i.d. over modes)
// and replaces the core parameters; phase diffusion rotates each of Bob's
// modes by an independent N(0, phase_sigma^2) angle before detection noise.
struct ChannelModel {
  double transmittance = 1.0;
  double excess_noise = 0.0;
  Perturbation perturbation = Perturbation::kNone;
  std::vector<MixtureComponent> mixture;
  double phase_sigma = 0.0;

  // Names of offending fields (with a reason); empty when valid.
  std::vector<std::string> problems() const;
  // Throws ValidationError listing problems().
  void validate() const;

  bool operator==(const ChannelModel&) const = default;
};

// Pure loss + excess noise, no perturbation.
inline ChannelModel lossy_channel(double transmittance, double excess_noise) {
  ChannelModel m;
  m.transmittance = transmittance;
  m.excess_noise = excess_noise;
  return m;
}

// Exact per-coordinate second moments <x^2>, <y^2>, <xy> of the model.
struct CoordinateMoments {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

CoordinateMoments coordinate_moments(double variance_a, const ChannelModel& model);

Eigen::VectorXd alice_modulate(const ModulationParams& params, Rng& rng);

Eigen::VectorXd channel_and_heterodyne(const Eigen::VectorXd& x, const ChannelModel& model,
                                       Rng& rng);

SampleBatch simulate_batch(const ModulationParams& params, const ChannelModel& model, Rng& rng);

// gamma = sqrt(2 (V - 1) / (V + 1)). Throws DomainError for V < 1.
double gamma_factor(double v);

// Q(x1, x2, y1, y2) = P(gamma x1, -gamma x2, y1, y2): maps each PM mode
// (x1, x2) to EB coordinates (x1 / gamma, -x2 / gamma); Bob's data is
// unchanged. Throws DegenerateError when gamma = 0.
SampleBatch pm_to_eb(const SampleBatch& pm, double v);
SampleBatch eb_to_pm(const SampleBatch& eb, double v);

enum class PostselectionRule {
  kNone,
  kAmplitudeThreshold,  // keep mode k when |beta_k| >= threshold
  kProductThreshold,    // keep when |alpha_k||beta_k| >= threshold and both
                        // quadratures of alpha_k and beta_k agree in sign
};

std::string to_string(PostselectionRule r);

struct PostselectionRegion {
  PostselectionRule rule = PostselectionRule::kNone;
  double threshold = 0.0;

  std::vector<std::string> problems() const;

  bool operator==(const PostselectionRegion&) const = default;
};

struct PostselectionResult {
  std::vector<std::uint8_t> mask;  // one entry per mode
  double acceptance = 1.0;
};

PostselectionResult postselect(const SampleBatch& batch, const PostselectionRegion& region);

// Batch restricted to the modes whose mask entry is set. Throws
// PreconditionError if nothing is kept.
SampleBatch keep_modes(const SampleBatch& batch, const std::vector<std::uint8_t>& mask);

enum class TripleSampler {
  kDirect,   // simulate the batch and sum the per-mode triples
  kWishart,  // draw the 2x2 scatter matrix of (x_j, y_j) directly
};

// True when kWishart is exact for the model (no perturbation or a mixture).
bool supports_wishart(const ChannelModel& model);

// One draw of (X^n, Y^n, Z^n) = (||x||^2, ||y||^2, x.y) for a batch of
// params.modes modes. The Wishart route samples the same law in O(#components)
// time via the Bartlett decomposition; it throws PreconditionError for models
// where supports_wishart() is false.
Eigen::Vector3d sample_triple_sum(const ModulationParams& params, const ChannelModel& model,
                                  TripleSampler sampler, Rng& rng);

}  // namespace cvsym
