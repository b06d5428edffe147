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

#ifndef CVSYM_CVSYM_H_
#define CVSYM_CVSYM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CVSYM_API __declspec(dllexport)
#else
#define CVSYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cvsym_status {
  CVSYM_OK = 0,
  CVSYM_ERR_INVALID_ARGUMENT = 1, /* null pointer or malformed argument */
  CVSYM_ERR_VALIDATION = 2,       /* configuration problems; see cvsym_last_error() */
  CVSYM_ERR_INVALID_DIMENSION = 3,
  CVSYM_ERR_PRECONDITION = 4,
  CVSYM_ERR_DOMAIN = 5,
  CVSYM_ERR_DEGENERATE = 6,
  CVSYM_ERR_IO = 7,
  CVSYM_ERR_NOT_FOUND = 8,
  CVSYM_ERR_RUNTIME = 9
} cvsym_status;

typedef struct cvsym_config cvsym_config;
typedef struct cvsym_report cvsym_report;

typedef struct cvsym_keyrate_result {
  double i_ab;
  double chi_be;
  double chi_numeric;
  double raw_rate;
  double rate;
  int no_key;
  double nu[3];
} cvsym_keyrate_result;

CVSYM_API const char* cvsym_version(void);
CVSYM_API const char* cvsym_status_name(cvsym_status status);
/* Message of the last failed call on the calling thread ("" if none). */
CVSYM_API const char* cvsym_last_error(void);
/* Releases strings returned through char** out-parameters. */
CVSYM_API void cvsym_string_free(char* s);

/* Configuration. `kind` may be NULL to keep the file's kind (or the default).
   A non-NULL kind that contradicts the file's "kind" key is a validation
   error. */
CVSYM_API cvsym_status cvsym_config_default(const char* kind, cvsym_config** out);
CVSYM_API cvsym_status cvsym_config_parse(const char* json_text, const char* kind,
                                          cvsym_config** out);
CVSYM_API cvsym_status cvsym_config_load(const char* path, const char* kind, cvsym_config** out);
/* Sets one key from a JSON-encoded value; the config is unchanged on error. */
CVSYM_API cvsym_status cvsym_config_set(cvsym_config* config, const char* key,
                                        const char* json_value);
CVSYM_API cvsym_status cvsym_config_set_seed(cvsym_config* config, uint64_t seed);
CVSYM_API cvsym_status cvsym_config_set_output_dir(cvsym_config* config, const char* dir);
CVSYM_API cvsym_status cvsym_config_validate(const cvsym_config* config);
CVSYM_API cvsym_status cvsym_config_to_json(const cvsym_config* config, char** out);
CVSYM_API void cvsym_config_free(cvsym_config* config);

/* Runs the experiment. `workers` (0 means 1) never changes the results. */
CVSYM_API cvsym_status cvsym_run(const cvsym_config* config, unsigned workers,
                                 cvsym_report** out);
CVSYM_API cvsym_status cvsym_report_to_json(const cvsym_report* report, int include_wall_clock,
                                            char** out);
/* format: "json", "csv" or "both". dir may be NULL: CVSYM_OUT_DIR, then the
   config's output_dir. */
CVSYM_API cvsym_status cvsym_report_emit(const cvsym_report* report, const char* dir,
                                         const char* format);
/* Numeric metric at a JSON pointer into the metrics object, e.g.
   "/grid/0/ks_max". CVSYM_ERR_NOT_FOUND when absent or not a number. */
CVSYM_API cvsym_status cvsym_report_metric(const cvsym_report* report, const char* pointer,
                                           double* out);
CVSYM_API void cvsym_report_free(cvsym_report* report);

/* Numerics. Matrices are row-major. */
CVSYM_API cvsym_status cvsym_gamma_factor(double v, double* out);
CVSYM_API cvsym_status cvsym_gaussian_tv_1d(double sigma1, double sigma2, double* out);
CVSYM_API cvsym_status cvsym_sigma_g(double a, double b, double c, double out[9]);
CVSYM_API cvsym_status cvsym_keyrate(double transmittance, double excess_noise, double v,
                                     double beta, cvsym_keyrate_result* out);
/* Haar-random element of K(n) acting on interleaved vectors; out holds
   (2n)^2 doubles. */
CVSYM_API cvsym_status cvsym_haar_kn(size_t n, uint64_t seed, double* out);
/* R in K(n) with R src = tgt for both parties; vectors have length 2n, out
   holds (2n)^2 doubles. residual may be NULL. */
CVSYM_API cvsym_status cvsym_witness(size_t n, const double* src_x, const double* src_y,
                                     const double* tgt_x, const double* tgt_y, double* out,
                                     double* residual);

#ifdef __cplusplus
}
#endif

#endif /* CVSYM_CVSYM_H_ */
