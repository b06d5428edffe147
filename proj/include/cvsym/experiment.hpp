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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvsym/batch.hpp"
#include "cvsym/protocol.hpp"
#include "cvsym/symmetrizer.hpp"

namespace cvsym {

using Json = nlohmann::json;

enum class ExperimentKind {
  kConvergenceSweep,
  kInvariantAudit,
  kDesignCompare,
  kKeyrateReport,
  kEstimationError,
};

enum class SamplerChoice { kAuto, kDirect, kWishart };
enum class AuditEnsemble { kOmegaSign, kIdentical, kRotated };
enum class DesignKind { kRootsOfUnity, kIdentity, kHaarSample };
enum class DesignReferenceChoice { kAuto, kExactU1, kMonteCarlo };

std::string to_string(ExperimentKind k);
std::string to_string(SamplerChoice s);
std::string to_string(AuditEnsemble e);
std::string to_string(DesignKind d);
std::string to_string(DesignReferenceChoice d);

// Parses a kind name ("convergence-sweep", ...). Throws ValidationError.
ExperimentKind experiment_kind_from_string(const std::string& s);

// One experiment, fully described by a flat JSON object. Key names match the
// field names below; see README.md for the table of keys and defaults.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kConvergenceSweep;
  std::size_t modes = 100;
  std::vector<std::size_t> n_grid{100, 1000, 10000};
  std::size_t trials = 1000;
  double variance_a = 4.0;
  ChannelModel channel = lossy_channel(0.5, 0.05);
  PostselectionRegion postselection;
  double estimation_fraction = 0.1;
  double be_constant = 1.0;
  double reconciliation_efficiency = 0.95;
  std::uint64_t seed = 1;
  SamplerChoice sampler = SamplerChoice::kAuto;
  std::size_t ks_projections = 16;
  std::size_t calibration_modes = 100000;
  std::size_t symmetrize_check_modes = 10;
  std::size_t symmetrize_checks = 100;

  AuditEnsemble audit_ensemble = AuditEnsemble::kOmegaSign;
  // First ensemble; the omega-sign ensemble flips symp_xy for the second.
  InvariantTriple audit_invariants{2.0, 2.0, 0.5, 1.0};
  std::vector<AuditStatistic> audit_statistics = AuditOptions{}.statistics;

  DesignKind design = DesignKind::kRootsOfUnity;
  std::size_t design_size = 4;
  unsigned design_degree = 1;
  std::size_t design_batches = 1000;
  DesignReferenceChoice design_reference = DesignReferenceChoice::kAuto;

  std::size_t estimation_m = 1000;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

// Defaults for a kind; identical across kinds except keyrate-report, which
// starts at 10^5 modes so the estimation subset reaches 1000.
ExperimentConfig default_config(ExperimentKind kind);

// Every problem with the config, each prefixed by the offending key.
std::vector<std::string> problems(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);  // throws ValidationError

Json to_json(const ExperimentConfig& config);

// Missing keys take default_config(kind). Unknown keys, wrong types and out-of-range values are all collected into
// a single ValidationError.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);  // IoError when unreadable

struct RunOptions {
  unsigned workers = 1;  // never changes results
};

struct ExperimentReport {
  ExperimentConfig config;
  Json metrics = Json::object();
  std::string version;
  double wall_clock_seconds = 0.0;

  Json to_json() const;
  static ExperimentReport from_json(const Json& j);

  // Report without the wall-clock field; identical across reruns.
  Json reproducible_json() const;
};

std::string version_string();

// Validates, then runs the experiment. Nothing is returned on failure.
ExperimentReport run(const ExperimentConfig& config, const RunOptions& options = {});

enum class OutputFormat { kJson, kCsv, kBoth };

OutputFormat output_format_from_string(const std::string& s);

// CVSYM_OUT_DIR, when set and non-empty, replaces config.output_dir.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

// Writes report.json (json), tables/*.csv (csv) and, for sweeps,
// plot/convergence.tsv under `dir`. CSV numbers carry 12 significant digits.
// Returns the files written; throws IoError when a file cannot be written.
std::vector<std::filesystem::path> emit(const ExperimentReport& report,
                                        const std::filesystem::path& dir, OutputFormat format);

// CSV tables of a report: name -> rows, first row is the header.
using Table = std::vector<std::vector<std::string>>;
std::vector<std::pair<std::string, Table>> report_tables(const ExperimentReport& report);

std::string format_number(double v);  // 12 significant digits

}  // namespace cvsym
