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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cvsym/distance.hpp"
#include "cvsym/errors.hpp"
#include "cvsym/protocol.hpp"
#include "cvsym/statistics.hpp"

using namespace cvsym;

namespace {

struct Moments {
  double xx = 0, yy = 0, xy = 0, yx_diff = 0;
};

Moments empirical(const SampleBatch& b) {
  const double n = static_cast<double>(b.x.size());
  Moments m;
  m.xx = b.x.squaredNorm() / n;
  m.yy = b.y.squaredNorm() / n;
  m.xy = b.x.dot(b.y) / n;
  m.yx_diff = (b.y - b.x).squaredNorm() / n;
  return m;
}

SampleBatch simulate(std::size_t modes, const ChannelModel& model, std::uint64_t seed,
                     double va = 4.0) {
  Rng rng(seed);
  return simulate_batch({modes, va}, model, rng);
}

}  // namespace

TEST_CASE("alice_modulate: per-quadrature variance is V_A / 2") {
  Rng rng(3);
  const std::size_t modes = 200000;
  const Eigen::VectorXd x = alice_modulate({modes, 4.0}, rng);
  REQUIRE(x.size() == static_cast<Eigen::Index>(2 * modes));
  const double var = x.squaredNorm() / x.size();
  const double se = 2.0 * std::sqrt(2.0 / x.size());
  CHECK(std::abs(var - 2.0) < 3 * se);
  CHECK(std::abs(x.mean()) < 3 * std::sqrt(2.0 / x.size()));
}

TEST_CASE("channel: identity channel adds one unit of heterodyne noise") {
  const SampleBatch b = simulate(200000, lossy_channel(1.0, 0.0), 4);
  const Moments m = empirical(b);
  const double se = std::sqrt(2.0 / b.x.size());
  CHECK(std::abs(m.yx_diff - 1.0) < 3 * se);
}

TEST_CASE("channel: T = 0 decorrelates Bob from Alice") {
  const SampleBatch b = simulate(200000, lossy_channel(0.0, 0.0), 5);
  const Moments m = empirical(b);
  const double se = std::sqrt(m.xx * m.yy / b.x.size());
  CHECK(std::abs(m.xy) < 4 * se);
  CHECK(std::abs(m.yy - 1.0) < 4 * std::sqrt(2.0 / b.x.size()));
}

TEST_CASE("channel: regression slope of y on x is sqrt(T)") {
  const SampleBatch b = simulate(200000, lossy_channel(0.5, 0.0), 6);
  const Moments m = empirical(b);
  const double slope = m.xy / m.xx;
  // Var(slope) = Var(g) / sum x^2.
  const double se = std::sqrt(1.0 / (m.xx * b.x.size()));
  CHECK(std::abs(slope - std::sqrt(0.5)) < 4 * se);
}

TEST_CASE("coordinate_moments: Gaussian core") {
  const CoordinateMoments m = coordinate_moments(4.0, lossy_channel(0.5, 0.1));
  CHECK(m.xx == doctest::Approx(2.0));
  CHECK(m.yy == doctest::Approx(0.5 * 2.0 + 1.0 + 0.5 * 0.1 / 2.0));
  CHECK(m.xy == doctest::Approx(std::sqrt(0.5) * 2.0));
  CHECK(heterodyne_noise_variance(0.5, 0.1) == doctest::Approx(1.025));
}

TEST_CASE("coordinate_moments: mixture and phase diffusion match simulation") {
  ChannelModel mix;
  mix.perturbation = Perturbation::kGaussianMixture;
  mix.mixture = {{0.5, 0.9, 0.01}, {0.5, 0.3, 0.2}};
  ChannelModel diff = lossy_channel(0.7, 0.05);
  diff.perturbation = Perturbation::kPhaseDiffusion;
  diff.phase_sigma = 0.4;

  const CoordinateMoments mm = coordinate_moments(4.0, mix);
  CHECK(mm.xy == doctest::Approx(0.5 * 2.0 * (std::sqrt(0.9) + std::sqrt(0.3))));
  const CoordinateMoments dm = coordinate_moments(4.0, diff);
  CHECK(dm.xy == doctest::Approx(std::sqrt(0.7) * 2.0 * std::exp(-0.08)));

  for (const ChannelModel* model : {&mix, &diff}) {
    const CoordinateMoments want = coordinate_moments(4.0, *model);
    const SampleBatch b = simulate(400000, *model, 7);
    const Moments got = empirical(b);
    const double n = static_cast<double>(b.x.size());
    CHECK(std::abs(got.xx - want.xx) < 5 * want.xx * std::sqrt(2.0 / n));
    CHECK(std::abs(got.yy - want.yy) < 5 * want.yy * std::sqrt(3.0 / n));
    CHECK(std::abs(got.xy - want.xy) < 5 * std::sqrt(want.xx * want.yy * 2.0 / n));
  }
}

TEST_CASE("ChannelModel: problems name the offending field") {
  ChannelModel bad = lossy_channel(1.5, -0.1);
  const auto p = bad.problems();
  REQUIRE(p.size() >= 2);
  CHECK(p[0].rfind("transmittance", 0) == 0);
  CHECK(p[1].rfind("excess_noise", 0) == 0);
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  ChannelModel mix;
  mix.perturbation = Perturbation::kGaussianMixture;
  mix.mixture = {{0.3, 0.5, 0.0}, {0.3, 0.5, 0.0}};
  bool weights_named = false;
  for (const auto& s : mix.problems()) weights_named |= s.rfind("mixture_weights", 0) == 0;
  CHECK(weights_named);
  CHECK(lossy_channel(0.5, 0.05).problems().empty());
}

TEST_CASE("gamma_factor: reference values") {
  CHECK(gamma_factor(1.0) == 0.0);
  CHECK(gamma_factor(3.0) == doctest::Approx(1.0));
  CHECK(gamma_factor(std::numeric_limits<double>::infinity()) == doctest::Approx(std::sqrt(2.0)));
  CHECK(gamma_factor(5.0) == doctest::Approx(std::sqrt(8.0 / 6.0)));
  CHECK_THROWS_AS(gamma_factor(0.5), DomainError);
}

TEST_CASE("pm_to_eb: conjugates Alice's mode and rescales") {
  const SampleBatch pm = SampleBatch::make(Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4));
  // V = 3 gives gamma = 1.
  const SampleBatch eb = pm_to_eb(pm, 3.0);
  CHECK(eb.x(0) == doctest::Approx(1));
  CHECK(eb.x(1) == doctest::Approx(-2));
  CHECK(eb.y(0) == 3);
  CHECK(eb.y(1) == 4);
  const SampleBatch back = eb_to_pm(eb, 3.0);
  CHECK((back.x - pm.x).norm() < 1e-15);

  CHECK_THROWS_AS(pm_to_eb(pm, 1.0), DegenerateError);

  // Second moments flip the sign of the p-quadrature correlation only.
  const SampleBatch b = simulate(100000, lossy_channel(0.6, 0.0), 8);
  const SampleBatch e = pm_to_eb(b, 5.0);
  const double g = gamma_factor(5.0);
  double qq = 0, pp = 0;
  for (Eigen::Index k = 0; k < e.x.size(); k += 2) {
    qq += e.x(k) * e.y(k) * g - b.x(k) * b.y(k);
    pp += e.x(k + 1) * e.y(k + 1) * g + b.x(k + 1) * b.y(k + 1);
  }
  CHECK(std::abs(qq) < 1e-9);
  CHECK(std::abs(pp) < 1e-9);
}

TEST_CASE("postselect: trivial regions") {
  const SampleBatch b = simulate(1000, lossy_channel(0.5, 0.05), 9);
  const PostselectionResult none = postselect(b, {});
  CHECK(none.acceptance == 1.0);
  CHECK(none.mask.size() == 1000);

  const PostselectionResult zero = postselect(b, {PostselectionRule::kAmplitudeThreshold, 0.0});
  CHECK(zero.acceptance == 1.0);
  const PostselectionResult inf = postselect(
      b, {PostselectionRule::kAmplitudeThreshold, std::numeric_limits<double>::infinity()});
  CHECK(inf.acceptance == 0.0);
  CHECK_THROWS_AS(keep_modes(b, inf.mask), PreconditionError);

  const PostselectionResult some = postselect(b, {PostselectionRule::kProductThreshold, 2.0});
  CHECK(some.acceptance > 0.0);
  CHECK(some.acceptance < 1.0);
  const SampleBatch kept = keep_modes(b, some.mask);
  CHECK(static_cast<double>(kept.modes()) == doctest::Approx(some.acceptance * 1000));
}

TEST_CASE("postselect: commutes with mode permutations") {
  const SampleBatch b = simulate(500, lossy_channel(0.5, 0.05), 10);
  std::vector<std::size_t> perm(500);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), Rng(11));
  Eigen::VectorXd px(1000), py(1000);
  for (std::size_t k = 0; k < 500; ++k) {
    px.segment<2>(2 * k) = b.x.segment<2>(2 * perm[k]);
    py.segment<2>(2 * k) = b.y.segment<2>(2 * perm[k]);
  }
  const PostselectionRegion region{PostselectionRule::kAmplitudeThreshold, 1.5};
  const auto m0 = postselect(b, region).mask;
  const auto m1 = postselect(SampleBatch::make(px, py), region).mask;
  for (std::size_t k = 0; k < 500; ++k) CHECK(m1[k] == m0[perm[k]]);
}

TEST_CASE("sample_triple_sum: Wishart sampler matches direct simulation") {
  ChannelModel mix;
  mix.perturbation = Perturbation::kGaussianMixture;
  mix.mixture = {{0.5, 0.9, 0.01}, {0.5, 0.3, 0.2}};
  for (const ChannelModel& model : {lossy_channel(0.5, 0.05), mix}) {
    const ModulationParams params{6, 4.0};
    Rng r1(12), r2(13);
    std::vector<double> d[3], w[3];
    for (int t = 0; t < 4000; ++t) {
      const Eigen::Vector3d a = sample_triple_sum(params, model, TripleSampler::kDirect, r1);
      const Eigen::Vector3d c = sample_triple_sum(params, model, TripleSampler::kWishart, r2);
      for (int i = 0; i < 3; ++i) {
        d[i].push_back(a(i));
        w[i].push_back(c(i));
      }
    }
    for (int i = 0; i < 3; ++i) CHECK(ks_two_sample(d[i], w[i]).p_value > 1e-3);
  }
  ChannelModel diff = lossy_channel(0.5, 0.0);
  diff.perturbation = Perturbation::kPhaseDiffusion;
  diff.phase_sigma = 0.1;
  CHECK_FALSE(supports_wishart(diff));
}
