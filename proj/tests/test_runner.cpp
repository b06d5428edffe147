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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cvsym/errors.hpp"
#include "cvsym/experiment.hpp"

using namespace cvsym;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(ExperimentKind kind) {
  ExperimentConfig c = default_config(kind);
  c.seed = 7;
  switch (kind) {
    case ExperimentKind::kConvergenceSweep:
      c.n_grid = {10, 40};
      c.trials = 1000;
      c.calibration_modes = 1000;
      c.symmetrize_checks = 5;
      break;
    case ExperimentKind::kInvariantAudit:
      c.modes = 6;
      c.trials = 300;
      break;
    case ExperimentKind::kDesignCompare:
      c.modes = 1;
      c.design_size = 4;
      c.design_degree = 2;
      c.design_batches = 50;
      break;
    case ExperimentKind::kKeyrateReport:
      c.modes = 10000;
      break;
    case ExperimentKind::kEstimationError:
      c.estimation_m = 50;
      c.trials = 200;
      break;
  }
  return c;
}

const ExperimentKind kAllKinds[] = {ExperimentKind::kConvergenceSweep, ExperimentKind::kInvariantAudit,
                                    ExperimentKind::kDesignCompare, ExperimentKind::kKeyrateReport,
                                    ExperimentKind::kEstimationError};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cvsym_test_" + name);
  fs::remove_all(p);
  return p;
}

bool names_field(const ValidationError& e, const std::string& field) {
  for (const auto& p : e.problems())
    if (p.rfind(field, 0) == 0) return true;
  return false;
}

}  // namespace

TEST_CASE("config: JSON round trip for every kind") {
  for (ExperimentKind k : kAllKinds) {
    const ExperimentConfig c = small_config(k);
    CHECK(config_from_json(to_json(c)) == c);
    CHECK(parse_config(to_json(c).dump()) == c);
    CHECK(experiment_kind_from_string(to_string(k)) == k);
  }
}

TEST_CASE("config: missing keys take per-kind defaults") {
  const ExperimentConfig c = parse_config(R"({"kind": "keyrate-report"})");
  CHECK(c == default_config(ExperimentKind::kKeyrateReport));
  CHECK(problems(c).empty());
  for (ExperimentKind k : kAllKinds) CHECK(problems(default_config(k)).empty());
}

TEST_CASE("config: validation names every offending field") {
  try {
    parse_config(R"({"kind": "convergence-sweep", "excess_noise": -1, "transmittance": 2, "bogus": 1})");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(names_field(e, "excess_noise"));
    CHECK(names_field(e, "transmittance"));
    CHECK(names_field(e, "bogus"));
  }
  CHECK_THROWS_AS(parse_config("{not json"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"kind": "nope"})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"kind": "convergence-sweep", "modes": "ten"})"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/cvsym.json"), IoError);

  ExperimentConfig w = small_config(ExperimentKind::kConvergenceSweep);
  w.sampler = SamplerChoice::kWishart;
  w.channel.perturbation = Perturbation::kPhaseDiffusion;
  w.channel.phase_sigma = 0.1;
  CHECK_FALSE(problems(w).empty());
  CHECK_THROWS_AS(run(w), ValidationError);
}

TEST_CASE("run: reports are identical across worker counts") {
  for (ExperimentKind k : kAllKinds) {
    const ExperimentConfig c = small_config(k);
    const ExperimentReport a = run(c, {1});
    const ExperimentReport b = run(c, {4});
    CHECK_MESSAGE(a.reproducible_json() == b.reproducible_json(), to_string(k));
    CHECK(a.metrics.contains("invariant_checks"));
    CHECK(a.metrics["invariant_checks"]["witness_failures"] == 0);
    CHECK(a.version == version_string());
    CHECK_FALSE(a.reproducible_json()["meta"].contains("wall_clock_seconds"));
    CHECK(a.to_json()["meta"].contains("wall_clock_seconds"));
  }
}

TEST_CASE("run: different seeds give different sweeps") {
  ExperimentConfig c = small_config(ExperimentKind::kConvergenceSweep);
  const Json a = run(c).metrics["grid"];
  c.seed = 8;
  CHECK(run(c).metrics["grid"] != a);
}

TEST_CASE("report: JSON round trip") {
  const ExperimentReport r = run(small_config(ExperimentKind::kKeyrateReport));
  const ExperimentReport back = ExperimentReport::from_json(r.to_json());
  CHECK(back.to_json() == r.to_json());
  CHECK(back.config == r.config);
}

TEST_CASE("emit: files, headers and number format") {
  const ExperimentReport r = run(small_config(ExperimentKind::kConvergenceSweep));
  const fs::path dir = scratch("emit");
  const auto files = emit(r, dir, OutputFormat::kBoth);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "tables" / "convergence.csv"));
  CHECK(fs::exists(dir / "plot" / "convergence.tsv"));
  CHECK(files.size() >= 3);

  const std::string csv = slurp(dir / "tables" / "convergence.csv");
  CHECK(csv.rfind("n,tv,ks_max,be_bound_over_c\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 3);

  CHECK(Json::parse(slurp(dir / "report.json")) == r.to_json());
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(2.0) == "2");

  const auto only_json = emit(r, scratch("emit_json"), OutputFormat::kJson);
  CHECK(only_json.size() == 1);
  fs::remove_all(dir);
  fs::remove_all(scratch("emit_json"));
}

TEST_CASE("emit: empty sweep writes header-only tables") {
  ExperimentConfig c = small_config(ExperimentKind::kConvergenceSweep);
  c.n_grid.clear();
  const ExperimentReport r = run(c);
  const fs::path dir = scratch("empty");
  emit(r, dir, OutputFormat::kCsv);
  CHECK(slurp(dir / "tables" / "convergence.csv") == "n,tv,ks_max,be_bound_over_c\n");
  fs::remove_all(dir);
}

TEST_CASE("emit: unwritable directory raises IoError") {
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "file";
  const ExperimentReport r = run(small_config(ExperimentKind::kKeyrateReport));
  CHECK_THROWS_AS(emit(r, blocker / "sub", OutputFormat::kJson), IoError);
  fs::remove(blocker);
}

TEST_CASE("resolve_output_dir: environment overrides the config") {
  ExperimentConfig c = small_config(ExperimentKind::kKeyrateReport);
  c.output_dir = "from_config";
  ::unsetenv("CVSYM_OUT_DIR");
  CHECK(resolve_output_dir(c) == fs::path("from_config"));
  ::setenv("CVSYM_OUT_DIR", "from_env", 1);
  CHECK(resolve_output_dir(c) == fs::path("from_env"));
  ::setenv("CVSYM_OUT_DIR", "", 1);
  CHECK(resolve_output_dir(c) == fs::path("from_config"));
  ::unsetenv("CVSYM_OUT_DIR");
}
