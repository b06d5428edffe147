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

#include "cvsym/cvsym.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "cvsym/errors.hpp"
#include "cvsym/experiment.hpp"
#include "cvsym/keyrate.hpp"
#include "cvsym/phase_space.hpp"
#include "cvsym/protocol.hpp"
#include "cvsym/statistics.hpp"
#include "cvsym/symmetrizer.hpp"

struct cvsym_config {
  cvsym::ExperimentConfig value;
};

struct cvsym_report {
  cvsym::ExperimentReport value;
};

namespace {

thread_local std::string last_error;

cvsym_status fail(cvsym_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

// Runs body and maps the exception hierarchy onto status codes.
template <typename F>
cvsym_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CVSYM_OK;
  } catch (const cvsym::ValidationError& e) {
    return fail(CVSYM_ERR_VALIDATION, e.what());
  } catch (const cvsym::InvalidDimension& e) {
    return fail(CVSYM_ERR_INVALID_DIMENSION, e.what());
  } catch (const cvsym::PreconditionError& e) {
    return fail(CVSYM_ERR_PRECONDITION, e.what());
  } catch (const cvsym::DomainError& e) {
    return fail(CVSYM_ERR_DOMAIN, e.what());
  } catch (const cvsym::DegenerateError& e) {
    return fail(CVSYM_ERR_DEGENERATE, e.what());
  } catch (const cvsym::IoError& e) {
    return fail(CVSYM_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(CVSYM_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(CVSYM_ERR_RUNTIME, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cvsym::Json with_kind(cvsym::Json j, const char* kind) {
  if (kind == nullptr) return j;
  if (!j.is_object()) return j;  // reported by config_from_json
  if (j.contains("kind") && j["kind"] != cvsym::Json(kind)) {
    throw cvsym::ValidationError({"kind: config file says " + j["kind"].dump() +
                                  " but '" + kind + "' was requested"});
  }
  j["kind"] = kind;
  return j;
}

cvsym::Json parse_json(const char* text) {
  try {
    return cvsym::Json::parse(text);
  } catch (const cvsym::Json::parse_error& e) {
    throw cvsym::ValidationError({std::string("config: not valid JSON (") + e.what() + ")"});
  }
}

void write_matrix(const Eigen::MatrixXd& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  }
}

}  // namespace

extern "C" {

const char* cvsym_version(void) {
  static const std::string v = cvsym::version_string();
  return v.c_str();
}

const char* cvsym_status_name(cvsym_status status) {
  switch (status) {
    case CVSYM_OK: return "ok";
    case CVSYM_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case CVSYM_ERR_VALIDATION: return "validation";
    case CVSYM_ERR_INVALID_DIMENSION: return "invalid-dimension";
    case CVSYM_ERR_PRECONDITION: return "precondition";
    case CVSYM_ERR_DOMAIN: return "domain";
    case CVSYM_ERR_DEGENERATE: return "degenerate";
    case CVSYM_ERR_IO: return "io";
    case CVSYM_ERR_NOT_FOUND: return "not-found";
    case CVSYM_ERR_RUNTIME: return "runtime";
  }
  return "unknown";
}

const char* cvsym_last_error(void) { return last_error.c_str(); }

void cvsym_string_free(char* s) { std::free(s); }

cvsym_status cvsym_config_default(const char* kind, cvsym_config** out) {
  if (!out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "out is null");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<cvsym_config>();
    if (kind) c->value = cvsym::default_config(cvsym::experiment_kind_from_string(kind));
    *out = c.release();
  });
}

cvsym_status cvsym_config_parse(const char* json_text, const char* kind, cvsym_config** out) {
  if (!json_text || !out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    if (kind) cvsym::experiment_kind_from_string(kind);
    auto c = std::make_unique<cvsym_config>();
    c->value = cvsym::config_from_json(with_kind(parse_json(json_text), kind));
    *out = c.release();
  });
}

cvsym_status cvsym_config_load(const char* path, const char* kind, cvsym_config** out) {
  if (!path || !out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    if (kind) cvsym::experiment_kind_from_string(kind);
    std::ifstream in(path);
    if (!in) throw cvsym::IoError(std::string("cannot read config file ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto c = std::make_unique<cvsym_config>();
    c->value = cvsym::config_from_json(with_kind(parse_json(ss.str().c_str()), kind));
    *out = c.release();
  });
}

cvsym_status cvsym_config_set(cvsym_config* config, const char* key, const char* json_value) {
  if (!config || !key || !json_value) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cvsym::Json j = cvsym::to_json(config->value);
    j[key] = parse_json(json_value);
    config->value = cvsym::config_from_json(j);
  });
}

cvsym_status cvsym_config_set_seed(cvsym_config* config, uint64_t seed) {
  if (!config) return fail(CVSYM_ERR_INVALID_ARGUMENT, "config is null");
  config->value.seed = seed;
  last_error.clear();
  return CVSYM_OK;
}

cvsym_status cvsym_config_set_output_dir(cvsym_config* config, const char* dir) {
  if (!config || !dir) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  if (*dir == '\0') return fail(CVSYM_ERR_VALIDATION, "output_dir: must not be empty");
  config->value.output_dir = dir;
  last_error.clear();
  return CVSYM_OK;
}

cvsym_status cvsym_config_validate(const cvsym_config* config) {
  if (!config) return fail(CVSYM_ERR_INVALID_ARGUMENT, "config is null");
  return guarded([&] { cvsym::validate(config->value); });
}

cvsym_status cvsym_config_to_json(const cvsym_config* config, char** out) {
  if (!config || !out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup(cvsym::to_json(config->value).dump(2)); });
}

void cvsym_config_free(cvsym_config* config) { delete config; }

cvsym_status cvsym_run(const cvsym_config* config, unsigned workers, cvsym_report** out) {
  if (!config || !out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<cvsym_report>();
    r->value = cvsym::run(config->value, cvsym::RunOptions{workers});
    *out = r.release();
  });
}

cvsym_status cvsym_report_to_json(const cvsym_report* report, int include_wall_clock,
                                  char** out) {
  if (!report || !out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cvsym::Json j =
        include_wall_clock ? report->value.to_json() : report->value.reproducible_json();
    *out = dup(j.dump(2));
  });
}

cvsym_status cvsym_report_emit(const cvsym_report* report, const char* dir, const char* format) {
  if (!report || !format) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto fmt = cvsym::output_format_from_string(format);
    const std::filesystem::path target =
        dir ? std::filesystem::path(dir) : cvsym::resolve_output_dir(report->value.config);
    cvsym::emit(report->value, target, fmt);
  });
}

cvsym_status cvsym_report_metric(const cvsym_report* report, const char* pointer, double* out) {
  if (!report || !pointer || !out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  try {
    const cvsym::Json::json_pointer ptr(pointer);
    const cvsym::Json& m = report->value.metrics;
    if (!m.contains(ptr)) return fail(CVSYM_ERR_NOT_FOUND, std::string("no metric at ") + pointer);
    const cvsym::Json& v = m.at(ptr);
    if (!v.is_number()) return fail(CVSYM_ERR_NOT_FOUND, std::string(pointer) + " is not a number");
    *out = v.get<double>();
    last_error.clear();
    return CVSYM_OK;
  } catch (const std::exception& e) {
    return fail(CVSYM_ERR_INVALID_ARGUMENT, e.what());
  }
}

void cvsym_report_free(cvsym_report* report) { delete report; }

cvsym_status cvsym_gamma_factor(double v, double* out) {
  if (!out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] { *out = cvsym::gamma_factor(v); });
}

cvsym_status cvsym_gaussian_tv_1d(double sigma1, double sigma2, double* out) {
  if (!out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] { *out = cvsym::gaussian_tv_1d(sigma1, sigma2); });
}

cvsym_status cvsym_sigma_g(double a, double b, double c, double out[9]) {
  if (!out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] { write_matrix(cvsym::sigma_g(a, b, c).uncentered, out); });
}

cvsym_status cvsym_keyrate(double transmittance, double excess_noise, double v, double beta,
                           cvsym_keyrate_result* out) {
  if (!out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    const auto r = cvsym::gaussian_keyrate(transmittance, excess_noise, v, beta);
    *out = cvsym_keyrate_result{r.i_ab, r.chi_be,  r.chi_numeric, r.raw_rate, r.rate,
                                r.no_key ? 1 : 0, {r.nu[0], r.nu[1], r.nu[2]}};
  });
}

cvsym_status cvsym_haar_kn(size_t n, uint64_t seed, double* out) {
  if (!out) return fail(CVSYM_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    cvsym::Rng rng(seed);
    write_matrix(cvsym::haar_kn(n, rng).matrix(), out);
  });
}

cvsym_status cvsym_witness(size_t n, const double* src_x, const double* src_y,
                           const double* tgt_x, const double* tgt_y, double* out,
                           double* residual) {
  if (!src_x || !src_y || !tgt_x || !tgt_y || !out) {
    return fail(CVSYM_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const auto len = static_cast<Eigen::Index>(2 * n);
    auto vec = [&](const double* p) { return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(p, len)); };
    const auto src = cvsym::SampleBatch::make(vec(src_x), vec(src_y));
    const auto tgt = cvsym::SampleBatch::make(vec(tgt_x), vec(tgt_y));
    const auto r = cvsym::witness_transform(src, tgt);
    write_matrix(r.matrix(), out);
    if (residual) *residual = cvsym::mapping_residual(r, src, tgt);
  });
}

}  // extern "C"
