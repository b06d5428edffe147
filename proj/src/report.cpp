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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>

#include "cvsym/errors.hpp"
#include "cvsym/experiment.hpp"

#ifndef CVSYM_VERSION
#define CVSYM_VERSION "0.0.0"
#endif

namespace cvsym {

namespace {

std::string cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

Json at(const Json& j, const char* key) { return j.contains(key) ? j.at(key) : Json(nullptr); }

Table convergence_table(const Json& m) {
  Table t{{"n", "tv", "ks_max", "be_bound_over_c"}};
  for (const auto& row : m.value("grid", Json::array())) {
    t.push_back({cell(row["n"]), cell(row["tv"]), cell(row["ks_max"]),
                 cell(row["be_bound_over_c"])});
  }
  return t;
}

Table convergence_detail(const Json& m) {
  Table t{{"n", "n_effective", "trials", "tv_bias_bound", "bins_per_axis", "ks_min_p", "be_bound",
           "acceptance", "skew_x", "skew_x_se", "kurt_x", "kurt_x_se", "skew_y", "kurt_y",
           "skew_z", "kurt_z"}};
  for (const auto& r : m.value("grid", Json::array())) {
    const Json& s = r["shape"];
    t.push_back({cell(r["n"]), cell(r["n_effective"]), cell(r["trials"]),
                 cell(r["tv_bias_bound"]), cell(r["bins_per_axis"]), cell(r["ks_min_p"]),
                 cell(r["be_bound"]), cell(r["acceptance"]), cell(s["x"]["skewness"]),
                 cell(s["x"]["skewness_se"]), cell(s["x"]["excess_kurtosis"]),
                 cell(s["x"]["kurtosis_se"]), cell(s["y"]["skewness"]),
                 cell(s["y"]["excess_kurtosis"]), cell(s["z"]["skewness"]),
                 cell(s["z"]["excess_kurtosis"])});
  }
  return t;
}

Table flatten(const Json& obj, const std::string& prefix, Table t) {
  for (const auto& [k, v] : obj.items()) {
    const std::string name = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      t = flatten(v, name, std::move(t));
    } else if (!v.is_array()) {
      t.push_back({name, cell(v)});
    }
  }
  return t;
}

}  // namespace

std::string version_string() { return CVSYM_VERSION; }

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json ExperimentReport::to_json() const {
  return {{"config", cvsym::to_json(config)},
          {"metrics", metrics},
          {"meta", {{"version", version}, {"wall_clock_seconds", wall_clock_seconds}}}};
}

ExperimentReport ExperimentReport::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("config") || !j.contains("metrics") || !j.contains("meta")) {
    throw ValidationError({"report: expected config, metrics and meta"});
  }
  ExperimentReport r;
  r.config = config_from_json(j.at("config"));
  r.metrics = j.at("metrics");
  r.version = j.at("meta").value("version", "");
  r.wall_clock_seconds = j.at("meta").value("wall_clock_seconds", 0.0);
  return r;
}

Json ExperimentReport::reproducible_json() const {
  Json j = to_json();
  j["meta"].erase("wall_clock_seconds");
  return j;
}

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "json") return OutputFormat::kJson;
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "both") return OutputFormat::kBoth;
  throw ValidationError({"format: '" + s + "' is not one of json|csv|both"});
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("CVSYM_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return config.output_dir;
}

std::vector<std::pair<std::string, Table>> report_tables(const ExperimentReport& report) {
  const Json& m = report.metrics;
  std::vector<std::pair<std::string, Table>> out;
  switch (report.config.kind) {
    case ExperimentKind::kConvergenceSweep:
      out.emplace_back("convergence", convergence_table(m));
      out.emplace_back("convergence_detail", convergence_detail(m));
      break;
    case ExperimentKind::kInvariantAudit: {
      Table t{{"statistic", "mean_first", "mean_second", "ks_statistic", "p_value"}};
      for (const auto& r : m.value("comparisons", Json::array())) {
        t.push_back({cell(r["statistic"]), cell(r["mean_first"]), cell(r["mean_second"]),
                     cell(r["ks_statistic"]), cell(r["p_value"])});
      }
      out.emplace_back("audit", std::move(t));
      break;
    }
    case ExperimentKind::kDesignCompare: {
      Table t{{"degree", "monomials", "max_abs", "max_standardized"}};
      for (const auto& r : m.value("per_degree", Json::array())) {
        t.push_back({cell(r["degree"]), cell(r["monomials"]), cell(r["max_abs"]),
                     cell(r["max_standardized"])});
      }
      out.emplace_back("design", std::move(t));
      if (m.contains("phase_moments")) {
        Table p{{"order", "re", "im", "abs_error"}};
        for (const auto& r : m["phase_moments"]) {
          p.push_back({cell(r["order"]), cell(r["re"]), cell(r["im"]), cell(r["abs_error"])});
        }
        out.emplace_back("phase_moments", std::move(p));
      }
      break;
    }
    case ExperimentKind::kKeyrateReport: {
      Json scalars = m;
      scalars.erase("invariant_checks");
      out.emplace_back("keyrate", flatten(scalars, "", Table{{"quantity", "value"}}));
      break;
    }
    case ExperimentKind::kEstimationError: {
      Table t{{"m", "entry", "mean", "mean_se", "std_dev", "unscaled_std", "skewness",
               "excess_kurtosis"}};
      auto add = [&](const Json& m_value, const Json& entries) {
        for (const auto& e : entries) {
          t.push_back({cell(m_value), cell(e["entry"]), cell(e["mean"]), cell(e["mean_se"]),
                       cell(e["std_dev"]), cell(e["unscaled_std"]), cell(e["skewness"]),
                       cell(e["excess_kurtosis"])});
        }
      };
      add(at(m, "m"), m.value("entries", Json::array()));
      if (m.contains("doubled")) add(m["doubled"]["m"], m["doubled"]["entries"]);
      out.emplace_back("estimation_error", std::move(t));
      break;
    }
  }
  out.emplace_back("invariant_checks",
                   flatten(m.value("invariant_checks", Json::object()), "",
                           Table{{"check", "value"}}));
  return out;
}

std::vector<std::filesystem::path> emit(const ExperimentReport& report,
                                        const std::filesystem::path& dir, OutputFormat format) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  auto ensure_dir = [](const fs::path& d) {
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec || !fs::is_directory(d)) throw IoError("cannot create directory " + d.string());
  };
  auto write = [&](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) throw IoError("cannot write " + path.string());
    written.push_back(path);
  };

  ensure_dir(dir);
  if (format != OutputFormat::kCsv) write(dir / "report.json", report.to_json().dump(2) + "\n");
  if (format == OutputFormat::kJson) return written;

  ensure_dir(dir / "tables");
  std::optional<Table> convergence;
  for (const auto& [name, table] : report_tables(report)) {
    std::string text;
    for (const auto& row : table) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        text += (i ? "," : "") + csv_escape(row[i]);
      }
      text += "\n";
    }
    write(dir / "tables" / (name + ".csv"), text);
    if (name == "convergence") convergence = table;
  }
  if (convergence) {
    ensure_dir(dir / "plot");
    std::string text;
    for (const auto& row : *convergence) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "\t" : "") + row[i];
      text += "\n";
    }
    write(dir / "plot" / "convergence.tsv", text);
  }
  return written;
}

}  // namespace cvsym
