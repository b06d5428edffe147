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

#include "cvsym/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cvsym/errors.hpp"

namespace cvsym {

namespace {

struct CoordinateLaw {
  double transmittance;
  double noise_sd;
};

void add_component(Eigen::Vector3d& acc, double sxx, double sxy, double syy, std::size_t dof,
                   Rng& rng) {
  if (dof == 0) return;
  const double l11 = std::sqrt(sxx);
  const double l21 = l11 > 0.0 ? sxy / l11 : 0.0;
  const double l22 = std::sqrt(std::max(0.0, syy - l21 * l21));
  std::chi_squared_distribution<double> c1(static_cast<double>(dof));
  const double a11sq = c1(rng);
  double a22sq = 0.0;
  if (dof > 1) {
    std::chi_squared_distribution<double> c2(static_cast<double>(dof - 1));
    a22sq = c2(rng);
  }
  std::normal_distribution<double> normal;
  const double a21 = normal(rng);
  // B = A A^T with A = [[sqrt(a11sq), 0], [a21, sqrt(a22sq)]].
  const double b11 = a11sq;
  const double b21 = std::sqrt(a11sq) * a21;
  const double b22 = a21 * a21 + a22sq;
  // W = L B L^T, L = [[l11, 0], [l21, l22]].
  const double w11 = l11 * l11 * b11;
  const double w21 = l11 * (l21 * b11 + l22 * b21);
  const double w22 = l21 * l21 * b11 + 2.0 * l21 * l22 * b21 + l22 * l22 * b22;
  acc += Eigen::Vector3d(w11, w22, w21);
}

}  // namespace

std::vector<std::string> ModulationParams::problems() const {
  std::vector<std::string> out;
  if (modes == 0) out.emplace_back("modes: must be at least 1");
  if (!(variance_a > 0.0) || !std::isfinite(variance_a)) {
    out.emplace_back("variance_a: must be positive and finite");
  }
  return out;
}

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::kNone: return "none";
    case Perturbation::kGaussianMixture: return "gaussian-mixture";
    case Perturbation::kPhaseDiffusion: return "phase-diffusion";
  }
  return "unknown";
}

std::vector<std::string> ChannelModel::problems() const {
  std::vector<std::string> out;
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(transmittance)) out.emplace_back("transmittance: must lie in [0, 1]");
  if (!(excess_noise >= 0.0) || !std::isfinite(excess_noise)) {
    out.emplace_back("excess_noise: must be non-negative and finite");
  }
  if (perturbation == Perturbation::kGaussianMixture) {
    if (mixture.empty()) out.emplace_back("mixture_weights: mixture needs at least one component");
    double total = 0.0;
    bool bad_weight = false, bad_t = false, bad_xi = false;
    for (const auto& c : mixture) {
      total += c.weight;
      bad_weight |= !(c.weight >= 0.0);
      bad_t |= !in_unit(c.transmittance);
      bad_xi |= !(c.excess_noise >= 0.0) || !std::isfinite(c.excess_noise);
    }
    if (bad_weight || (!mixture.empty() && std::abs(total - 1.0) > 1e-9)) {
      out.emplace_back("mixture_weights: must be non-negative and sum to 1");
    }
    if (bad_t) out.emplace_back("mixture_transmittance: every entry must lie in [0, 1]");
    if (bad_xi) out.emplace_back("mixture_excess_noise: every entry must be non-negative");
  }
  if (perturbation == Perturbation::kPhaseDiffusion &&
      (!(phase_sigma >= 0.0) || !std::isfinite(phase_sigma))) {
    out.emplace_back("phase_sigma: must be non-negative and finite");
  }
  return out;
}

void ChannelModel::validate() const {
  auto p = problems();
  if (!p.empty()) throw ValidationError(std::move(p));
}

CoordinateMoments coordinate_moments(double variance_a, const ChannelModel& model) {
  const double sxx = variance_a / 2.0;
  CoordinateMoments m{sxx, 0.0, 0.0};
  auto add = [&](double w, double t, double xi, double phase_mean) {
    m.yy += w * (t * sxx + heterodyne_noise_variance(t, xi));
    m.xy += w * std::sqrt(t) * sxx * phase_mean;
  };
  switch (model.perturbation) {
    case Perturbation::kNone:
      add(1.0, model.transmittance, model.excess_noise, 1.0);
      break;
    case Perturbation::kGaussianMixture:
      for (const auto& c : model.mixture) add(c.weight, c.transmittance, c.excess_noise, 1.0);
      break;
    case Perturbation::kPhaseDiffusion:
      // E cos(phi) for phi ~ N(0, s^2).
      add(1.0, model.transmittance, model.excess_noise,
          std::exp(-0.5 * model.phase_sigma * model.phase_sigma));
      break;
  }
  return m;
}

Eigen::VectorXd alice_modulate(const ModulationParams& params, Rng& rng) {
  if (params.modes == 0) throw InvalidDimension("modulation needs at least one mode");
  if (!(params.variance_a >= 0.0)) throw DomainError("variance_a must be non-negative");
  std::normal_distribution<double> normal(0.0, std::sqrt(params.variance_a / 2.0));
  Eigen::VectorXd x(static_cast<Eigen::Index>(2 * params.modes));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  return x;
}

Eigen::VectorXd channel_and_heterodyne(const Eigen::VectorXd& x, const ChannelModel& model,
                                       Rng& rng) {
  if (x.size() == 0 || x.size() % 2 != 0) throw InvalidDimension("x must have even length");
  model.validate();
  std::normal_distribution<double> normal;
  Eigen::VectorXd y(x.size());

  std::vector<double> cumulative;
  if (model.perturbation == Perturbation::kGaussianMixture) {
    double acc = 0.0;
    for (const auto& c : model.mixture) cumulative.push_back(acc += c.weight);
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  for (Eigen::Index k = 0; k < x.size(); k += 2) {
    double t = model.transmittance;
    double xi = model.excess_noise;
    if (model.perturbation == Perturbation::kGaussianMixture) {
      const double u = uniform(rng) * cumulative.back();
      std::size_t c = 0;
      while (c + 1 < cumulative.size() && u >= cumulative[c]) ++c;
      t = model.mixture[c].transmittance;
      xi = model.mixture[c].excess_noise;
    }
    const double gain = std::sqrt(t);
    double s1 = gain * x(k);
    double s2 = gain * x(k + 1);
    if (model.perturbation == Perturbation::kPhaseDiffusion) {
      const double phi = model.phase_sigma * normal(rng);
      const double c = std::cos(phi), s = std::sin(phi);
      const double r1 = c * s1 - s * s2;
      const double r2 = s * s1 + c * s2;
      s1 = r1;
      s2 = r2;
    }
    const double sd = std::sqrt(heterodyne_noise_variance(t, xi));
    y(k) = s1 + sd * normal(rng);
    y(k + 1) = s2 + sd * normal(rng);
  }
  return y;
}

SampleBatch simulate_batch(const ModulationParams& params, const ChannelModel& model, Rng& rng) {
  Eigen::VectorXd x = alice_modulate(params, rng);
  Eigen::VectorXd y = channel_and_heterodyne(x, model, rng);
  return SampleBatch{std::move(x), std::move(y)};
}

double gamma_factor(double v) {
  if (!(v >= 1.0)) throw DomainError("gamma_factor: V must be at least 1");
  if (std::isinf(v)) return std::sqrt(2.0);
  return std::sqrt(2.0 * (v - 1.0) / (v + 1.0));
}

SampleBatch pm_to_eb(const SampleBatch& pm, double v) {
  const double g = gamma_factor(v);
  if (g == 0.0) throw DegenerateError("pm_to_eb: gamma = 0 (V = 1) has no inverse");
  SampleBatch out = SampleBatch::make(pm.x, pm.y);
  for (Eigen::Index k = 0; k < out.x.size(); k += 2) {
    out.x(k) = pm.x(k) / g;
    out.x(k + 1) = -pm.x(k + 1) / g;
  }
  return out;
}

SampleBatch eb_to_pm(const SampleBatch& eb, double v) {
  const double g = gamma_factor(v);
  if (g == 0.0) throw DegenerateError("eb_to_pm: gamma = 0 (V = 1)");
  SampleBatch out = SampleBatch::make(eb.x, eb.y);
  for (Eigen::Index k = 0; k < out.x.size(); k += 2) {
    out.x(k) = g * eb.x(k);
    out.x(k + 1) = -g * eb.x(k + 1);
  }
  return out;
}

std::string to_string(PostselectionRule r) {
  switch (r) {
    case PostselectionRule::kNone: return "none";
    case PostselectionRule::kAmplitudeThreshold: return "amplitude-threshold";
    case PostselectionRule::kProductThreshold: return "product-threshold";
  }
  return "unknown";
}

std::vector<std::string> PostselectionRegion::problems() const {
  std::vector<std::string> out;
  if (!(threshold >= 0.0)) out.emplace_back("postselection_threshold: must be non-negative");
  return out;
}

PostselectionResult postselect(const SampleBatch& batch, const PostselectionRegion& region) {
  if (!(region.threshold >= 0.0)) throw PreconditionError("postselection threshold must be >= 0");
  const std::size_t n = batch.modes();
  PostselectionResult res;
  res.mask.assign(n, 1);
  if (region.rule == PostselectionRule::kNone || n == 0) {
    res.acceptance = 1.0;
    return res;
  }
  std::size_t kept = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto q = static_cast<Eigen::Index>(2 * k);
    const double beta = std::hypot(batch.y(q), batch.y(q + 1));
    bool keep = false;
    if (region.rule == PostselectionRule::kAmplitudeThreshold) {
      keep = beta >= region.threshold;
    } else {
      const double alpha = std::hypot(batch.x(q), batch.x(q + 1));
      const bool signs = std::signbit(batch.x(q)) == std::signbit(batch.y(q)) &&
                         std::signbit(batch.x(q + 1)) == std::signbit(batch.y(q + 1));
      keep = signs && alpha * beta >= region.threshold;
    }
    res.mask[k] = keep ? 1 : 0;
    kept += keep ? 1 : 0;
  }
  res.acceptance = static_cast<double>(kept) / static_cast<double>(n);
  return res;
}

SampleBatch keep_modes(const SampleBatch& batch, const std::vector<std::uint8_t>& mask) {
  if (mask.size() != batch.modes()) throw InvalidDimension("mask length differs from mode count");
  const auto kept = static_cast<Eigen::Index>(std::count(mask.begin(), mask.end(), 1));
  if (kept == 0) throw PreconditionError("postselection kept no modes");
  Eigen::VectorXd x(2 * kept), y(2 * kept);
  Eigen::Index j = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    const auto q = static_cast<Eigen::Index>(2 * k);
    x.segment(2 * j, 2) = batch.x.segment(q, 2);
    y.segment(2 * j, 2) = batch.y.segment(q, 2);
    ++j;
  }
  return SampleBatch{std::move(x), std::move(y)};
}

bool supports_wishart(const ChannelModel& model) {
  return model.perturbation != Perturbation::kPhaseDiffusion;
}

Eigen::Vector3d sample_triple_sum(const ModulationParams& params, const ChannelModel& model,
                                  TripleSampler sampler, Rng& rng) {
  if (params.modes == 0) throw InvalidDimension("need at least one mode");
  if (sampler == TripleSampler::kDirect) {
    const SampleBatch b = simulate_batch(params, model, rng);
    return {b.x.squaredNorm(), b.y.squaredNorm(), b.x.dot(b.y)};
  }
  if (!supports_wishart(model)) {
    throw PreconditionError("Wishart sampler does not apply to phase diffusion");
  }
  model.validate();
  const double sxx = params.variance_a / 2.0;
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  auto component = [&](double t, double xi, std::size_t count) {
    const double sxy = std::sqrt(t) * sxx;
    const double syy = t * sxx + heterodyne_noise_variance(t, xi);
    add_component(acc, sxx, sxy, syy, 2 * count, rng);
  };
  if (model.perturbation == Perturbation::kNone) {
    component(model.transmittance, model.excess_noise, params.modes);
    return acc;
  }
  // Multinomial split of the modes over components.
  std::size_t remaining = params.modes;
  double weight_left = 1.0;
  for (std::size_t c = 0; c < model.mixture.size(); ++c) {
    const auto& comp = model.mixture[c];
    std::size_t count = remaining;
    if (c + 1 < model.mixture.size()) {
      const double p = weight_left > 0.0 ? std::clamp(comp.weight / weight_left, 0.0, 1.0) : 0.0;
      std::binomial_distribution<std::size_t> split(remaining, p);
      count = split(rng);
    }
    component(comp.transmittance, comp.excess_noise, count);
    remaining -= count;
    weight_left -= comp.weight;
  }
  return acc;
}

}  // namespace cvsym
