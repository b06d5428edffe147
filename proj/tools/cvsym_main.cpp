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

// Command-line front end. Talks to the library only through cvsym.h.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cvsym/cvsym.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 0;
  std::string format = "both";
};

struct Headline {
  const char* label;
  const char* pointer;
};

std::vector<Headline> headlines(const std::string& kind) {
  if (kind == "convergence-sweep") return {{"slope_ks", "/slope_ks"}, {"slope_tv", "/slope_tv"}};
  if (kind == "invariant-audit") {
    return {{"min_p_value", "/min_p_value"}, {"max_invariant_change", "/max_invariant_change"}};
  }
  if (kind == "design-compare") return {{"phase_moment_max_error", "/phase_moment_max_error"}};
  if (kind == "keyrate-report") {
    return {{"acceptance", "/acceptance"},
            {"transmittance_hat", "/estimate/raw_transmittance"},
            {"excess_noise_hat", "/estimate/raw_excess_noise"},
            {"rate_estimated", "/rate_estimated/rate"},
            {"rate_model", "/rate_model/rate"}};
  }
  if (kind == "estimation-error") return {{"std_ratio_x4", "/std_ratio/x4"}};
  return {};
}

int report_failure(cvsym_status s, const char* what) {
  std::fprintf(stderr, "cvsym: %s failed (%s): %s\n", what, cvsym_status_name(s),
               cvsym_last_error());
  return s == CVSYM_ERR_VALIDATION ? kExitValidation : kExitRuntime;
}

int run_kind(const std::string& kind, const Options& opt) {
  cvsym_config* cfg = nullptr;
  cvsym_status s = opt.config.empty() ? cvsym_config_default(kind.c_str(), &cfg)
                                      : cvsym_config_load(opt.config.c_str(), kind.c_str(), &cfg);
  if (s != CVSYM_OK) return report_failure(s, "loading the configuration");

  int code = kExitOk;
  cvsym_report* rep = nullptr;
  do {
    if (opt.seed && (s = cvsym_config_set_seed(cfg, *opt.seed)) != CVSYM_OK) {
      code = report_failure(s, "setting the seed");
      break;
    }
    if ((s = cvsym_config_validate(cfg)) != CVSYM_OK) {
      code = report_failure(s, "validation");
      break;
    }
    const unsigned workers =
        opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    if ((s = cvsym_run(cfg, workers, &rep)) != CVSYM_OK) {
      code = report_failure(s, "the run");
      break;
    }
    if ((s = cvsym_report_emit(rep, opt.out.empty() ? nullptr : opt.out.c_str(),
                               opt.format.c_str())) != CVSYM_OK) {
      code = report_failure(s, "writing the report");
      break;
    }
    for (const auto& h : headlines(kind)) {
      double v = 0.0;
      if (cvsym_report_metric(rep, h.pointer, &v) == CVSYM_OK) {
        std::printf("%s = %.12g\n", h.label, v);
      }
    }
  } while (false);

  cvsym_report_free(rep);
  cvsym_config_free(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for symmetrized continuous-variable QKD"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cvsym_version()));

  Options opt;
  const std::vector<std::pair<std::string, std::string>> kinds{
      {"convergence-sweep", "TV/KS distance of the invariant sums to their Gaussian limit"},
      {"invariant-audit", "compare symmetrized statistics of two invariant-matched ensembles"},
      {"design-compare", "moments under a finite design against Haar averaging"},
      {"keyrate-report", "channel estimation and Gaussian-attack key rate"},
      {"estimation-error", "distribution of sqrt(m)(Sigma_est - Sigma_G)"}};
  for (const auto& [name, help] : kinds) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "master seed (overrides the file)");
    sub->add_option("--out", opt.out, "output directory (overrides CVSYM_OUT_DIR and the file)");
    sub->add_option("--workers", opt.workers, "worker threads (default: all cores)");
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "both"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }
  for (const auto& [name, help] : kinds) {
    if (app.got_subcommand(name)) return run_kind(name, opt);
  }
  return kExitValidation;
}
