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
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>

#include "cvsym/errors.hpp"
#include "cvsym/experiment.hpp"

namespace cvsym {

namespace {

template <typename E>
using NameTable = std::vector<std::pair<E, const char*>>;

const NameTable<ExperimentKind>& kind_names() {
  static const NameTable<ExperimentKind> t{
      {ExperimentKind::kConvergenceSweep, "convergence-sweep"},
      {ExperimentKind::kInvariantAudit, "invariant-audit"},
      {ExperimentKind::kDesignCompare, "design-compare"},
      {ExperimentKind::kKeyrateReport, "keyrate-report"},
      {ExperimentKind::kEstimationError, "estimation-error"}};
  return t;
}

const NameTable<SamplerChoice>& sampler_names() {
  static const NameTable<SamplerChoice> t{{SamplerChoice::kAuto, "auto"},
                                          {SamplerChoice::kDirect, "direct"},
                                          {SamplerChoice::kWishart, "wishart"}};
  return t;
}

const NameTable<AuditEnsemble>& ensemble_names() {
  static const NameTable<AuditEnsemble> t{{AuditEnsemble::kOmegaSign, "omega-sign"},
                                          {AuditEnsemble::kIdentical, "identical"},
                                          {AuditEnsemble::kRotated, "rotated"}};
  return t;
}

const NameTable<DesignKind>& design_names() {
  static const NameTable<DesignKind> t{{DesignKind::kRootsOfUnity, "roots-of-unity"},
                                       {DesignKind::kIdentity, "identity"},
                                       {DesignKind::kHaarSample, "haar-sample"}};
  return t;
}

const NameTable<DesignReferenceChoice>& reference_names() {
  static const NameTable<DesignReferenceChoice> t{
      {DesignReferenceChoice::kAuto, "auto"},
      {DesignReferenceChoice::kExactU1, "exact-u1"},
      {DesignReferenceChoice::kMonteCarlo, "monte-carlo"}};
  return t;
}

const NameTable<Perturbation>& perturbation_names() {
  static const NameTable<Perturbation> t{{Perturbation::kNone, "none"},
                                         {Perturbation::kGaussianMixture, "gaussian-mixture"},
                                         {Perturbation::kPhaseDiffusion, "phase-diffusion"}};
  return t;
}

const NameTable<PostselectionRule>& rule_names() {
  static const NameTable<PostselectionRule> t{
      {PostselectionRule::kNone, "none"},
      {PostselectionRule::kAmplitudeThreshold, "amplitude-threshold"},
      {PostselectionRule::kProductThreshold, "product-threshold"}};
  return t;
}

template <typename E>
std::string name_of(const NameTable<E>& t, E e) {
  for (const auto& [v, n] : t) {
    if (v == e) return n;
  }
  return "unknown";
}

template <typename E>
std::optional<E> lookup(const NameTable<E>& t, const std::string& s) {
  for (const auto& [v, n] : t) {
    if (s == n) return v;
  }
  return std::nullopt;
}

template <typename E>
std::string choices(const NameTable<E>& t) {
  std::string out;
  for (const auto& [v, n] : t) out += (out.empty() ? "" : "|") + std::string(n);
  return out;
}

// Number of monomials of degree <= d in v variables: C(v + d, d).
double monomial_count(std::size_t vars, unsigned degree) {
  double c = 1.0;
  for (unsigned i = 1; i <= degree; ++i) c = c * static_cast<double>(vars + i) / i;
  return c;
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void size(const Json& v, const std::string& key, std::size_t& out) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::size_t>();
    } else {
      problems_.push_back(key + ": expected a non-negative integer");
    }
  }

  void u64(const Json& v, const std::string& key, std::uint64_t& out) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::uint64_t>();
    } else {
      problems_.push_back(key + ": expected a non-negative integer");
    }
  }

  void real(const Json& v, const std::string& key, double& out) {
    if (v.is_number()) {
      out = v.get<double>();
    } else {
      problems_.push_back(key + ": expected a number");
    }
  }

  void text(const Json& v, const std::string& key, std::string& out) {
    if (v.is_string()) {
      out = v.get<std::string>();
    } else {
      problems_.push_back(key + ": expected a string");
    }
  }

  template <typename E>
  void choice(const Json& v, const std::string& key, const NameTable<E>& t, E& out) {
    std::string s;
    if (!v.is_string()) {
      problems_.push_back(key + ": expected one of " + choices(t));
      return;
    }
    s = v.get<std::string>();
    if (auto e = lookup(t, s)) {
      out = *e;
    } else {
      problems_.push_back(key + ": '" + s + "' is not one of " + choices(t));
    }
  }

  void sizes(const Json& v, const std::string& key, std::vector<std::size_t>& out) {
    if (!v.is_array()) {
      problems_.push_back(key + ": expected an array of non-negative integers");
      return;
    }
    out.clear();
    for (const auto& e : v) {
      std::size_t s = 0;
      const auto before = problems_.size();
      size(e, key, s);
      if (problems_.size() != before) return;
      out.push_back(s);
    }
  }

  void reals(const Json& v, const std::string& key, std::vector<double>& out) {
    if (!v.is_array()) {
      problems_.push_back(key + ": expected an array of numbers");
      return;
    }
    out.clear();
    for (const auto& e : v) {
      double d = 0.0;
      const auto before = problems_.size();
      real(e, key, d);
      if (problems_.size() != before) return;
      out.push_back(d);
    }
  }

 private:
  std::vector<std::string>& problems_;
};

std::size_t design_modes(const ExperimentConfig& c) {
  return c.design == DesignKind::kRootsOfUnity ? 1 : c.modes;
}

}  // namespace

std::string to_string(ExperimentKind k) { return name_of(kind_names(), k); }
std::string to_string(SamplerChoice s) { return name_of(sampler_names(), s); }
std::string to_string(AuditEnsemble e) { return name_of(ensemble_names(), e); }
std::string to_string(DesignKind d) { return name_of(design_names(), d); }
std::string to_string(DesignReferenceChoice d) { return name_of(reference_names(), d); }

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (auto k = lookup(kind_names(), s)) return *k;
  throw ValidationError({"kind: '" + s + "' is not one of " + choices(kind_names())});
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  if (kind == ExperimentKind::kKeyrateReport) c.modes = 100000;
  return c;
}

std::vector<std::string> problems(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto add = [&](std::vector<std::string> more) {
    out.insert(out.end(), more.begin(), more.end());
  };
  const auto kind = c.kind;

  if (c.modes == 0) out.emplace_back("modes: must be at least 1");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] == 0) {
      out.emplace_back("n_grid: entries must be at least 1");
      break;
    }
    if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) {
      out.emplace_back("n_grid: must be strictly increasing");
      break;
    }
  }
  if (c.trials == 0) out.emplace_back("trials: must be at least 1");
  if (kind == ExperimentKind::kConvergenceSweep && !c.n_grid.empty() && c.trials < 1000) {
    out.emplace_back("trials: convergence-sweep needs at least 1000");
  }
  if ((kind == ExperimentKind::kEstimationError || kind == ExperimentKind::kInvariantAudit) &&
      c.trials < 2) {
    out.emplace_back("trials: must be at least 2");
  }

  ModulationParams mod{c.modes, c.variance_a};
  for (auto& p : mod.problems()) {
    if (p.rfind("variance_a", 0) == 0) out.push_back(std::move(p));
  }
  add(c.channel.problems());
  add(c.postselection.problems());

  if (!(c.estimation_fraction > 0.0 && c.estimation_fraction <= 1.0)) {
    out.emplace_back("estimation_fraction: must lie in (0, 1]");
  }
  if (!(c.be_constant >= 0.0) || !std::isfinite(c.be_constant)) {
    out.emplace_back("be_constant: must be non-negative and finite");
  }
  if (!(c.reconciliation_efficiency >= 0.0 && c.reconciliation_efficiency <= 1.0)) {
    out.emplace_back("reconciliation_efficiency: must lie in [0, 1]");
  }
  if (c.sampler == SamplerChoice::kWishart) {
    if (!supports_wishart(c.channel)) {
      out.emplace_back("sampler: wishart cannot sample phase diffusion");
    }
    if (c.postselection.rule != PostselectionRule::kNone) {
      out.emplace_back("sampler: wishart cannot apply postselection");
    }
  }
  if (kind == ExperimentKind::kConvergenceSweep && c.calibration_modes < 1000) {
    out.emplace_back("calibration_modes: must be at least 1000");
  }
  if (c.symmetrize_check_modes == 0) out.emplace_back("symmetrize_check_modes: must be at least 1");

  if (kind == ExperimentKind::kInvariantAudit) {
    const auto& t = c.audit_invariants;
    const double lhs = t.dot_xy * t.dot_xy + t.symp_xy * t.symp_xy;
    const double rhs = t.norm_x_sq * t.norm_y_sq;
    if (!(t.norm_x_sq >= 0.0) || !(t.norm_y_sq >= 0.0)) {
      out.emplace_back("audit_norm_x_sq: squared norms must be non-negative");
    } else if (lhs > rhs * (1.0 + 1e-12)) {
      out.emplace_back("audit_symp_xy: dot_xy^2 + symp_xy^2 exceeds norm_x_sq * norm_y_sq");
    } else if (c.modes == 1 && std::abs(lhs - rhs) > 1e-12 * std::max(1.0, rhs)) {
      out.emplace_back("modes: a single-mode audit needs dot_xy^2 + symp_xy^2 = norm_x_sq * norm_y_sq");
    }
    if (c.audit_statistics.empty()) out.emplace_back("audit_statistics: must not be empty");
  }

  if (kind == ExperimentKind::kDesignCompare) {
    if (c.design_size == 0) out.emplace_back("design_size: must be at least 1");
    if (c.design_degree == 0) out.emplace_back("design_degree: must be at least 1");
    if (c.design_batches < 2) out.emplace_back("design_batches: must be at least 2");
    if (c.design_reference == DesignReferenceChoice::kExactU1 && design_modes(c) != 1) {
      out.emplace_back("design_reference: exact-u1 needs a single-mode design");
    }
    const double monos = monomial_count(4 * design_modes(c), 2 * c.design_degree) - 1.0;
    if (monos > static_cast<double>(kMaxDesignMonomials)) {
      out.emplace_back("design_degree: more than 200000 monomials for this mode count");
    } else {
      const double size = c.design == DesignKind::kIdentity ? 1.0 : static_cast<double>(c.design_size);
      if ((2.0 * static_cast<double>(c.design_batches) + size) * monos >
          static_cast<double>(kMaxDesignCells)) {
        out.emplace_back("design_batches: batches x monomials exceeds the memory cap");
      }
    }
  }

  if (kind == ExperimentKind::kKeyrateReport &&
      static_cast<double>(c.modes) * c.estimation_fraction < 1000.0) {
    out.emplace_back("estimation_fraction: modes * estimation_fraction must be at least 1000");
  }
  if (kind == ExperimentKind::kEstimationError && c.estimation_m < 10) {
    out.emplace_back("estimation_m: must be at least 10");
  }
  if (c.output_dir.empty()) out.emplace_back("output_dir: must not be empty");
  return out;
}

void validate(const ExperimentConfig& config) {
  auto p = problems(config);
  if (!p.empty()) throw ValidationError(std::move(p));
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["modes"] = c.modes;
  j["n_grid"] = c.n_grid;
  j["trials"] = c.trials;
  j["variance_a"] = c.variance_a;
  j["transmittance"] = c.channel.transmittance;
  j["excess_noise"] = c.channel.excess_noise;
  j["perturbation"] = to_string(c.channel.perturbation);
  std::vector<double> w, t, xi;
  for (const auto& m : c.channel.mixture) {
    w.push_back(m.weight);
    t.push_back(m.transmittance);
    xi.push_back(m.excess_noise);
  }
  j["mixture_weights"] = w;
  j["mixture_transmittance"] = t;
  j["mixture_excess_noise"] = xi;
  j["phase_sigma"] = c.channel.phase_sigma;
  j["postselection"] = to_string(c.postselection.rule);
  j["postselection_threshold"] = c.postselection.threshold;
  j["estimation_fraction"] = c.estimation_fraction;
  j["be_constant"] = c.be_constant;
  j["reconciliation_efficiency"] = c.reconciliation_efficiency;
  j["seed"] = c.seed;
  j["sampler"] = to_string(c.sampler);
  j["ks_projections"] = c.ks_projections;
  j["calibration_modes"] = c.calibration_modes;
  j["symmetrize_check_modes"] = c.symmetrize_check_modes;
  j["symmetrize_checks"] = c.symmetrize_checks;
  j["audit_ensemble"] = to_string(c.audit_ensemble);
  j["audit_norm_x_sq"] = c.audit_invariants.norm_x_sq;
  j["audit_norm_y_sq"] = c.audit_invariants.norm_y_sq;
  j["audit_dot_xy"] = c.audit_invariants.dot_xy;
  j["audit_symp_xy"] = c.audit_invariants.symp_xy;
  std::vector<std::string> stats;
  for (auto s : c.audit_statistics) stats.push_back(to_string(s));
  j["audit_statistics"] = stats;
  j["design"] = to_string(c.design);
  j["design_size"] = c.design_size;
  j["design_degree"] = c.design_degree;
  j["design_batches"] = c.design_batches;
  j["design_reference"] = to_string(c.design_reference);
  j["estimation_m"] = c.estimation_m;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError({"config: expected a JSON object"});
  std::vector<std::string> bad;
  Reader r(bad);
  ExperimentKind kind = ExperimentKind::kConvergenceSweep;
  if (j.contains("kind")) r.choice(j.at("kind"), "kind", kind_names(), kind);
  if (!bad.empty()) throw ValidationError(std::move(bad));
  ExperimentConfig c = default_config(kind);
  std::vector<double> mw, mt, mx;
  bool has_mixture = false;

  for (const auto& [key, v] : j.items()) {
    if (key == "kind") r.choice(v, key, kind_names(), c.kind);
    else if (key == "modes") r.size(v, key, c.modes);
    else if (key == "n_grid") r.sizes(v, key, c.n_grid);
    else if (key == "trials") r.size(v, key, c.trials);
    else if (key == "variance_a") r.real(v, key, c.variance_a);
    else if (key == "transmittance") r.real(v, key, c.channel.transmittance);
    else if (key == "excess_noise") r.real(v, key, c.channel.excess_noise);
    else if (key == "perturbation") r.choice(v, key, perturbation_names(), c.channel.perturbation);
    else if (key == "mixture_weights") { r.reals(v, key, mw); has_mixture = true; }
    else if (key == "mixture_transmittance") { r.reals(v, key, mt); has_mixture = true; }
    else if (key == "mixture_excess_noise") { r.reals(v, key, mx); has_mixture = true; }
    else if (key == "phase_sigma") r.real(v, key, c.channel.phase_sigma);
    else if (key == "postselection") r.choice(v, key, rule_names(), c.postselection.rule);
    else if (key == "postselection_threshold") r.real(v, key, c.postselection.threshold);
    else if (key == "estimation_fraction") r.real(v, key, c.estimation_fraction);
    else if (key == "be_constant") r.real(v, key, c.be_constant);
    else if (key == "reconciliation_efficiency") r.real(v, key, c.reconciliation_efficiency);
    else if (key == "seed") r.u64(v, key, c.seed);
    else if (key == "sampler") r.choice(v, key, sampler_names(), c.sampler);
    else if (key == "ks_projections") r.size(v, key, c.ks_projections);
    else if (key == "calibration_modes") r.size(v, key, c.calibration_modes);
    else if (key == "symmetrize_check_modes") r.size(v, key, c.symmetrize_check_modes);
    else if (key == "symmetrize_checks") r.size(v, key, c.symmetrize_checks);
    else if (key == "audit_ensemble") r.choice(v, key, ensemble_names(), c.audit_ensemble);
    else if (key == "audit_norm_x_sq") r.real(v, key, c.audit_invariants.norm_x_sq);
    else if (key == "audit_norm_y_sq") r.real(v, key, c.audit_invariants.norm_y_sq);
    else if (key == "audit_dot_xy") r.real(v, key, c.audit_invariants.dot_xy);
    else if (key == "audit_symp_xy") r.real(v, key, c.audit_invariants.symp_xy);
    else if (key == "audit_statistics") {
      if (!v.is_array()) {
        bad.emplace_back("audit_statistics: expected an array of statistic names");
        continue;
      }
      c.audit_statistics.clear();
      for (const auto& e : v) {
        auto s = e.is_string() ? audit_statistic_from_string(e.get<std::string>()) : std::nullopt;
        if (!s) {
          bad.emplace_back("audit_statistics: unknown statistic " + e.dump());
          continue;
        }
        c.audit_statistics.push_back(*s);
      }
    }
    else if (key == "design") r.choice(v, key, design_names(), c.design);
    else if (key == "design_size") r.size(v, key, c.design_size);
    else if (key == "design_degree") {
      std::size_t d = c.design_degree;
      r.size(v, key, d);
      c.design_degree = static_cast<unsigned>(std::min<std::size_t>(d, 1u << 16));
    }
    else if (key == "design_batches") r.size(v, key, c.design_batches);
    else if (key == "design_reference") r.choice(v, key, reference_names(), c.design_reference);
    else if (key == "estimation_m") r.size(v, key, c.estimation_m);
    else if (key == "output_dir") r.text(v, key, c.output_dir);
    else bad.push_back(key + ": unknown key");
  }

  if (has_mixture) {
    if (mw.size() != mt.size() || mw.size() != mx.size()) {
      bad.emplace_back(
          "mixture_weights: mixture_weights, mixture_transmittance and mixture_excess_noise "
          "must have equal length");
    } else {
      c.channel.mixture.clear();
      for (std::size_t i = 0; i < mw.size(); ++i) {
        c.channel.mixture.push_back({mw[i], mt[i], mx[i]});
      }
    }
  }
  if (c.channel.perturbation != Perturbation::kGaussianMixture && !c.channel.mixture.empty() &&
      bad.empty()) {
    // A mixture is only meaningful with the mixture perturbation; keep it for
    // the echo but flag the likely mistake.
    bad.emplace_back("perturbation: mixture components given but perturbation is not gaussian-mixture");
  }

  auto rest = problems(c);
  bad.insert(bad.end(), rest.begin(), rest.end());
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError({std::string("config: not valid JSON (") + e.what() + ")"});
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cvsym
