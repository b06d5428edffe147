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

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cvsym/distance.hpp"
#include "cvsym/errors.hpp"
#include "cvsym/experiment.hpp"
#include "cvsym/keyrate.hpp"
#include "cvsym/phase_space.hpp"
#include "cvsym/statistics.hpp"

namespace cvsym {

namespace {

// Sub-stream tags under the master seed; one per independent purpose.
enum : std::uint64_t {
  kTagChecks = 1,
  kTagCalibration = 2,
  kTagAudit = 3,
  kTagAuditRotation = 4,
  kTagDesign = 5,
  kTagDesignSample = 6,
  kTagKeyrate = 7,
  kTagEstimation = 8,
  kTagGrid = 1000,
  kTagProjections = 2000,
};

constexpr std::size_t kChunk = 1024;

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vec_json(const Eigen::Vector3d& v) { return Json::array({v(0), v(1), v(2)}); }

Json mat_json(const Eigen::Matrix3d& m) {
  Json out = Json::array();
  for (int i = 0; i < 3; ++i) out.push_back(Json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return out;
}

Json summary_json(const MomentSummary& s) {
  return {{"count", s.count},
          {"mean", vec_json(s.mean)},
          {"second_moment", mat_json(s.second_moment)},
          {"covariance", mat_json(s.covariance)},
          {"third_abs", s.third_abs},
          {"lambda_min", s.lambda_min}};
}

Json ks_json(const KsResult& k) { return {{"statistic", k.statistic}, {"p_value", k.p_value}}; }

Json shape_json(const SampleShape& s) {
  return {{"mean", s.mean},
          {"variance", s.variance},
          {"skewness", s.skewness},
          {"skewness_se", s.skewness_se},
          {"excess_kurtosis", s.excess_kurtosis},
          {"kurtosis_se", s.kurtosis_se}};
}

Json invariants_json(const InvariantTriple& t) {
  return {{"norm_x_sq", t.norm_x_sq},
          {"norm_y_sq", t.norm_y_sq},
          {"dot_xy", t.dot_xy},
          {"symp_xy", t.symp_xy}};
}

ModulationParams modulation(const ExperimentConfig& c, std::size_t modes) {
  return ModulationParams{modes, c.variance_a};
}

SampleBatch postselected(const SampleBatch& b, const PostselectionRegion& region,
                         double* acceptance) {
  if (region.rule == PostselectionRule::kNone) {
    if (acceptance) *acceptance = 1.0;
    return b;
  }
  const PostselectionResult ps = postselect(b, region);
  if (acceptance) *acceptance = ps.acceptance;
  return keep_modes(b, ps.mask);
}

// Least-squares slope of log(v) against log(n) over positive entries.
Json loglog_slope(const std::vector<std::size_t>& n, const std::vector<double>& v) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (v[i] > 0.0 && std::isfinite(v[i])) {
      pts.emplace_back(std::log(static_cast<double>(n[i])), std::log(v[i]));
    }
  }
  if (pts.size() < 2) return nullptr;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

// Group, invariant, composition and witness residuals on random data.
Json invariant_checks(const ExperimentConfig& c, unsigned workers) {
  struct Slot {
    double ortho = 0.0, symp = 0.0, invariant = 0.0, composition = 0.0, witness = 0.0;
    bool witness_failed = false;
  };
  const std::size_t n = c.symmetrize_check_modes;
  const std::uint64_t master = derive_seed(c.seed, kTagChecks);
  std::vector<Slot> slots(c.symmetrize_checks);
  parallel_for(slots.size(), workers, [&](std::size_t i) {
    Rng rng = make_stream(master, i);
    const SymplecticOrthogonal r1 = haar_kn(n, rng);
    const SymplecticOrthogonal r2 = haar_kn(n, rng);
    const SampleBatch b = simulate_batch(modulation(c, n), c.channel, rng);
    const SampleBatch b1 = apply_symmetrization(b, r1);
    Slot& s = slots[i];
    s.ortho = std::max(r1.orthogonality_residual(), r2.orthogonality_residual());
    s.symp = std::max(r1.symplecticity_residual(), r2.symplecticity_residual());
    s.invariant = invariant_relative_change(invariants(b), invariants(b1));
    const SampleBatch lhs = apply_symmetrization(b1, r2);
    const SampleBatch rhs = apply_symmetrization(b, r2 * r1);
    const double scale =
        std::max({1.0, b.x.cwiseAbs().maxCoeff(), b.y.cwiseAbs().maxCoeff()});
    s.composition = std::max((lhs.x - rhs.x).cwiseAbs().maxCoeff(),
                             (lhs.y - rhs.y).cwiseAbs().maxCoeff()) / scale;
    try {
      const SymplecticOrthogonal w = witness_transform(b, b1);
      s.witness = mapping_residual(w, b, b1);
    } catch (const Error&) {
      s.witness_failed = true;
    }
  });
  Slot worst;
  std::size_t failures = 0;
  for (const auto& s : slots) {
    worst.ortho = std::max(worst.ortho, s.ortho);
    worst.symp = std::max(worst.symp, s.symp);
    worst.invariant = std::max(worst.invariant, s.invariant);
    worst.composition = std::max(worst.composition, s.composition);
    worst.witness = std::max(worst.witness, s.witness);
    failures += s.witness_failed ? 1 : 0;
  }
  return {{"checks", slots.size()},
          {"modes", n},
          {"max_orthogonality_residual", worst.ortho},
          {"max_symplecticity_residual", worst.symp},
          {"max_invariant_change", worst.invariant},
          {"max_composition_residual", worst.composition},
          {"max_witness_residual", worst.witness},
          {"witness_failures", failures}};
}

TripleSampler resolve_sampler(const ExperimentConfig& c) {
  switch (c.sampler) {
    case SamplerChoice::kDirect: return TripleSampler::kDirect;
    case SamplerChoice::kWishart: return TripleSampler::kWishart;
    case SamplerChoice::kAuto: break;
  }
  return supports_wishart(c.channel) && c.postselection.rule == PostselectionRule::kNone
             ? TripleSampler::kWishart
             : TripleSampler::kDirect;
}

Json run_convergence(const ExperimentConfig& c, unsigned workers) {
  const TripleSampler sampler = resolve_sampler(c);
  const bool postselecting = c.postselection.rule != PostselectionRule::kNone;

  Rng cal_rng = make_stream(c.seed, kTagCalibration);
  double cal_acceptance = 1.0;
  const SampleBatch cal = postselected(
      simulate_batch(modulation(c, c.calibration_modes), c.channel, cal_rng), c.postselection,
      &cal_acceptance);
  const MomentSummary per_mode = summarize(triple_reduce(cal));

  Json grid = Json::array();
  std::vector<double> tvs, kss;
  for (std::size_t g = 0; g < c.n_grid.size(); ++g) {
    const std::size_t n = c.n_grid[g];
    const std::uint64_t master = derive_seed(c.seed, kTagGrid + g);
    const std::size_t chunks = (c.trials + kChunk - 1) / kChunk;
    std::vector<Eigen::Vector3d> samples(c.trials);
    std::vector<double> accepted(chunks, 0.0);
    parallel_for(chunks, workers, [&](std::size_t k) {
      Rng rng = make_stream(master, k);
      const std::size_t end = std::min(c.trials, (k + 1) * kChunk);
      for (std::size_t t = k * kChunk; t < end; ++t) {
        if (!postselecting) {
          samples[t] = sample_triple_sum(modulation(c, n), c.channel, sampler, rng);
          continue;
        }
        const SampleBatch b = simulate_batch(modulation(c, n), c.channel, rng);
        const PostselectionResult ps = postselect(b, c.postselection);
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        for (std::size_t m = 0; m < n; ++m) {
          if (!ps.mask[m]) continue;
          const auto q = static_cast<Eigen::Index>(2 * m);
          v += Eigen::Vector3d(b.x.segment(q, 2).squaredNorm(), b.y.segment(q, 2).squaredNorm(),
                               b.x.segment(q, 2).dot(b.y.segment(q, 2)));
        }
        samples[t] = v;
        accepted[k] += ps.acceptance;
      }
    });

    const MomentSummary emp = summarize(std::span<const Eigen::Vector3d>(samples));
    const Tv3dReport tv = empirical_tv_3d(samples, emp.mean, emp.covariance, c.ks_projections,
                                          derive_seed(c.seed, kTagProjections + g));
    Json shapes;
    const char* names[3] = {"x", "y", "z"};
    std::vector<double> col(samples.size());
    for (int a = 0; a < 3; ++a) {
      for (std::size_t t = 0; t < samples.size(); ++t) col[t] = samples[t](a);
      shapes[names[a]] = shape_json(sample_shape(col));
    }
    Json axis = Json::array(), proj = Json::array();
    for (const auto& k : tv.axis_ks) axis.push_back(ks_json(k));
    for (const auto& k : tv.projection_ks) proj.push_back(ks_json(k));

    double acceptance = 1.0;
    if (postselecting) {
      double s = 0.0;
      for (double a : accepted) s += a;
      acceptance = s / static_cast<double>(c.trials);
    }
    const auto n_eff = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * cal_acceptance)));
    Json be_over_c = nullptr, be = nullptr;
    if (per_mode.lambda_min > 0.0) {
      const double b1 = berry_esseen_bound(per_mode, n_eff, 1.0);
      be_over_c = b1;
      be = c.be_constant * b1;
    }
    tvs.push_back(tv.tv);
    kss.push_back(tv.ks_max);
    grid.push_back({{"n", n},
                    {"n_effective", n_eff},
                    {"trials", c.trials},
                    {"tv", tv.tv},
                    {"tv_bias_bound", tv.bias_bound},
                    {"bins_per_axis", tv.bins_per_axis},
                    {"ks_max", tv.ks_max},
                    {"ks_min_p", tv.ks_min_p},
                    {"axis_ks", axis},
                    {"projection_ks", proj},
                    {"be_bound_over_c", be_over_c},
                    {"be_bound", be},
                    {"acceptance", acceptance},
                    {"mean", vec_json(emp.mean)},
                    {"covariance", mat_json(emp.covariance)},
                    {"shape", shapes}});
  }
  return {{"sampler", sampler == TripleSampler::kWishart ? "wishart" : "direct"},
          {"per_mode", summary_json(per_mode)},
          {"calibration_acceptance", cal_acceptance},
          {"grid", grid},
          {"slope_tv", loglog_slope(c.n_grid, tvs)},
          {"slope_ks", loglog_slope(c.n_grid, kss)}};
}

Json run_audit(const ExperimentConfig& c, unsigned workers) {
  const InvariantTriple first = c.audit_invariants;
  InvariantTriple second = first;
  if (c.audit_ensemble == AuditEnsemble::kOmegaSign) second.symp_xy = -first.symp_xy;
  const std::size_t n = c.modes;
  Rng rot_rng = make_stream(c.seed, kTagAuditRotation);
  const SymplecticOrthogonal r0 = haar_kn(n, rot_rng);

  BatchSampler a = [&](Rng& rng) { return batch_with_invariants(n, first, rng); };
  BatchSampler b = [&](Rng& rng) {
    SampleBatch s = batch_with_invariants(n, second, rng);
    return c.audit_ensemble == AuditEnsemble::kRotated ? apply_symmetrization(s, r0) : s;
  };
  AuditOptions opt;
  opt.trials = c.trials;
  opt.seed = derive_seed(c.seed, kTagAudit);
  opt.workers = workers;
  opt.statistics = c.audit_statistics;
  const AuditReport rep = invariant_audit(a, b, opt);

  Json comps = Json::array();
  double min_p = 1.0;
  for (const auto& s : rep.comparisons) {
    comps.push_back({{"statistic", s.statistic},
                     {"mean_first", s.mean_first},
                     {"mean_second", s.mean_second},
                     {"ks_statistic", s.ks_statistic},
                     {"p_value", s.p_value}});
    min_p = std::min(min_p, s.p_value);
  }
  return {{"ensemble", to_string(c.audit_ensemble)},
          {"modes", rep.modes},
          {"trials", rep.trials},
          {"underpowered", rep.underpowered},
          {"first_invariants", invariants_json(rep.first_invariants)},
          {"second_invariants", invariants_json(rep.second_invariants)},
          {"max_invariant_change", rep.max_invariant_change},
          {"min_p_value", min_p},
          {"comparisons", comps}};
}

Json run_design(const ExperimentConfig& c, unsigned workers) {
  Design design;
  switch (c.design) {
    case DesignKind::kRootsOfUnity: design = roots_of_unity_design(c.design_size); break;
    case DesignKind::kIdentity: design = identity_design(c.modes); break;
    case DesignKind::kHaarSample: {
      Rng rng = make_stream(c.seed, kTagDesignSample);
      design = haar_sample_design(c.modes, c.design_size, rng);
      break;
    }
  }
  const std::size_t n = design.modes();
  HaarReference ref = HaarReference::kMonteCarlo;
  if (c.design_reference == DesignReferenceChoice::kExactU1 ||
      (c.design_reference == DesignReferenceChoice::kAuto && n == 1)) {
    ref = HaarReference::kExactU1;
  }
  const ModulationParams mod = modulation(c, n);
  BatchSampler sampler = [&](Rng& rng) { return simulate_batch(mod, c.channel, rng); };
  const DesignReport rep = finite_design_average(sampler, c.design_batches, design,
                                                 c.design_degree, ref,
                                                 derive_seed(c.seed, kTagDesign), workers);
  Json degrees = Json::array();
  for (const auto& d : rep.per_degree) {
    degrees.push_back({{"degree", d.degree},
                       {"monomials", d.monomials},
                       {"max_abs", d.max_abs},
                       {"max_standardized",
                        d.max_standardized ? Json(*d.max_standardized) : Json(nullptr)}});
  }
  Json out = {{"design", rep.design},
              {"modes", rep.modes},
              {"design_size", rep.design_size},
              {"batches", rep.batches},
              {"k", rep.k},
              {"reference", to_string(rep.reference)},
              {"per_degree", degrees}};
  if (n == 1) {
    // Haar phase moments E e^{i m theta} are 1 for m = 0 and 0 otherwise.
    const int order = static_cast<int>(2 * c.design_degree + 1);
    const auto moments = phase_moments(design, order);
    Json list = Json::array();
    double worst = 0.0;
    for (int m = -order; m <= order; ++m) {
      const auto v = moments[static_cast<std::size_t>(m + order)];
      const double err = std::abs(v - std::complex<double>(m == 0 ? 1.0 : 0.0, 0.0));
      list.push_back({{"order", m}, {"re", v.real()}, {"im", v.imag()}, {"abs_error", err}});
      worst = std::max(worst, err);
    }
    out["phase_moments"] = list;
    out["phase_moment_max_error"] = worst;
  }
  return out;
}

Json estimate_json(const ChannelEstimate& e) {
  return {{"transmittance", e.transmittance},
          {"excess_noise", num(e.excess_noise)},
          {"raw_transmittance", e.raw_transmittance},
          {"raw_excess_noise", num(e.raw_excess_noise)},
          {"transmittance_se", e.transmittance_se},
          {"excess_noise_se", num(e.excess_noise_se)},
          {"v", e.v},
          {"beta", e.beta},
          {"modes", e.modes}};
}

Json rate_json(const KeyRateResult& r) {
  return {{"i_ab", r.i_ab},
          {"chi_be", r.chi_be},
          {"chi_numeric", r.chi_numeric},
          {"raw_rate", r.raw_rate},
          {"rate", r.rate},
          {"no_key", r.no_key},
          {"symplectic_eigenvalues", Json::array({r.nu[0], r.nu[1], r.nu[2]})},
          {"min_symplectic", r.min_symplectic}};
}

// Gaussian channel with the same coordinate second moments as the model.
std::pair<double, double> gaussian_equivalent(const ExperimentConfig& c) {
  const CoordinateMoments m = coordinate_moments(c.variance_a, c.channel);
  const double g = m.xy / m.xx;
  const double t = g * g;
  const double xi = t > 0.0 ? 2.0 * (m.yy - t * m.xx - 1.0) / t : 0.0;
  return {t, std::max(0.0, xi)};
}

Json run_keyrate(const ExperimentConfig& c) {
  Rng rng = make_stream(c.seed, kTagKeyrate);
  double acceptance = 1.0;
  const SampleBatch raw = simulate_batch(modulation(c, c.modes), c.channel, rng);
  const SampleBatch kept = postselected(raw, c.postselection, &acceptance);
  const auto m = static_cast<std::size_t>(
      std::floor(static_cast<double>(kept.modes()) * c.estimation_fraction));
  if (m < kMinEstimationModes) {
    throw PreconditionError("keyrate-report: only " + std::to_string(m) +
                            " modes left for estimation (need 1000)");
  }
  const std::vector<std::size_t> idx = choose_indices(kept.modes(), m, rng);
  Eigen::VectorXd ex(2 * static_cast<Eigen::Index>(m)), ey(ex.size());
  std::vector<std::size_t> coords;
  coords.reserve(2 * m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto q = static_cast<Eigen::Index>(2 * idx[j]);
    const auto o = static_cast<Eigen::Index>(2 * j);
    ex.segment(o, 2) = kept.x.segment(q, 2);
    ey.segment(o, 2) = kept.y.segment(q, 2);
    coords.push_back(2 * idx[j]);
    coords.push_back(2 * idx[j] + 1);
  }
  const SampleBatch sub{ex, ey};
  const double v = c.variance_a + 1.0;
  const ChannelEstimate est = estimate_channel(sub, v, c.reconciliation_efficiency);
  const auto [t_eq, xi_eq] = gaussian_equivalent(c);

  Json out;
  out["acceptance"] = acceptance;
  out["modes_kept"] = kept.modes();
  out["estimation_modes"] = m;
  out["estimate"] = estimate_json(est);
  if (std::isfinite(est.excess_noise)) {
    out["rate_estimated"] = rate_json(gaussian_keyrate(est));
  } else {
    out["rate_estimated"] = nullptr;
  }
  out["model_gaussian_equivalent"] = {{"transmittance", t_eq}, {"excess_noise", xi_eq}};
  out["rate_model"] = rate_json(gaussian_keyrate(t_eq, xi_eq, v, c.reconciliation_efficiency));

  const CoordinateMoments cm = coordinate_moments(c.variance_a, c.channel);
  const GaussianLimitMatrix sg = sigma_g(cm.xx, cm.yy, cm.xy);
  const std::span<const double> xs(kept.x.data(), static_cast<std::size_t>(kept.x.size()));
  const std::span<const double> ys(kept.y.data(), static_cast<std::size_t>(kept.y.size()));
  const SigmaEstimate se = sigma_est(xs, ys, coords);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (se.std_error(i, j) > 0.0) {
        worst = std::max(worst, std::abs(se.value(i, j) - sg.uncentered(i, j)) / se.std_error(i, j));
      }
    }
  }
  out["sigma_g"] = mat_json(sg.uncentered);
  out["sigma_est"] = mat_json(se.value);
  out["sigma_est_std_error"] = mat_json(se.std_error);
  out["sigma_max_standardized_deviation"] = worst;

  const MomentSummary per_mode = summarize(triple_reduce(kept));
  out["per_mode"] = summary_json(per_mode);
  if (per_mode.lambda_min > 0.0) {
    const double b1 = berry_esseen_bound(per_mode, kept.modes(), 1.0);
    out["be_bound_over_c"] = b1;
    out["be_bound"] = c.be_constant * b1;
  } else {
    out["be_bound_over_c"] = nullptr;
    out["be_bound"] = nullptr;
  }
  return out;
}

Json run_estimation(const ExperimentConfig& c, unsigned workers) {
  const CoordinateMoments cm = coordinate_moments(c.variance_a, c.channel);
  const GaussianLimitMatrix sg = sigma_g(cm.xx, cm.yy, cm.xy);
  PairSampler sampler = [&](std::size_t count, Rng& rng, std::vector<double>& x,
                            std::vector<double>& y) {
    const SampleBatch b = simulate_batch(modulation(c, (count + 1) / 2), c.channel, rng);
    x.assign(b.x.data(), b.x.data() + count);
    y.assign(b.y.data(), b.y.data() + count);
  };
  auto entries = [](const EstimationErrorReport& r) {
    Json list = Json::array();
    for (const auto& e : r.entries) {
      list.push_back({{"entry", e.entry},
                      {"mean", e.mean},
                      {"mean_se", e.mean_se},
                      {"std_dev", e.std_dev},
                      {"unscaled_std", e.unscaled_std},
                      {"skewness", e.skewness},
                      {"excess_kurtosis", e.excess_kurtosis}});
    }
    return list;
  };
  const EstimationErrorReport single = estimation_error_mc(
      sampler, sg.uncentered, c.estimation_m, c.trials, derive_seed(c.seed, kTagEstimation), workers);
  const EstimationErrorReport doubled =
      estimation_error_mc(sampler, sg.uncentered, 2 * c.estimation_m, c.trials,
                          derive_seed(c.seed, kTagEstimation + 1), workers);
  Json ratios = Json::object();
  for (std::size_t e = 0; e < single.entries.size(); ++e) {
    const double d = doubled.entries[e].unscaled_std;
    ratios[single.entries[e].entry] = d > 0.0 ? Json(single.entries[e].unscaled_std / d) : Json(nullptr);
  }
  return {{"reference", mat_json(sg.uncentered)},
          {"m", c.estimation_m},
          {"trials", c.trials},
          {"entries", entries(single)},
          {"doubled", {{"m", 2 * c.estimation_m}, {"entries", entries(doubled)}}},
          {"std_ratio", ratios}};
}

}  // namespace

ExperimentReport run(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const unsigned workers = std::max(1u, options.workers);
  const auto start = std::chrono::steady_clock::now();

  Json metrics;
  switch (config.kind) {
    case ExperimentKind::kConvergenceSweep: metrics = run_convergence(config, workers); break;
    case ExperimentKind::kInvariantAudit: metrics = run_audit(config, workers); break;
    case ExperimentKind::kDesignCompare: metrics = run_design(config, workers); break;
    case ExperimentKind::kKeyrateReport: metrics = run_keyrate(config); break;
    case ExperimentKind::kEstimationError: metrics = run_estimation(config, workers); break;
  }
  metrics["invariant_checks"] = invariant_checks(config, workers);

  ExperimentReport report;
  report.config = config;
  report.metrics = std::move(metrics);
  report.version = version_string();
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace cvsym
