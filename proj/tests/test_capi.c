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

// Exercises the C interface through the shared library only.

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "cvsym/cvsym.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_numerics(void) {
  double v = 0.0;
  EXPECT(cvsym_gamma_factor(3.0, &v) == CVSYM_OK && fabs(v - 1.0) < 1e-15);
  EXPECT(cvsym_gamma_factor(0.5, &v) == CVSYM_ERR_DOMAIN);
  EXPECT(strlen(cvsym_last_error()) > 0);
  EXPECT(cvsym_gamma_factor(3.0, NULL) == CVSYM_ERR_INVALID_ARGUMENT);

  EXPECT(cvsym_gaussian_tv_1d(1.0, 2.0, &v) == CVSYM_OK && fabs(v - 0.645349137669537) < 1e-12);

  double s[9];
  EXPECT(cvsym_sigma_g(1.0, 1.0, 0.0, s) == CVSYM_OK);
  EXPECT(s[0] == 3.0 && s[1] == 1.0 && s[4] == 3.0 && s[8] == 1.0 && s[2] == 0.0);

  cvsym_keyrate_result k;
  EXPECT(cvsym_keyrate(0.9, 0.01, 11.0, 0.95, &k) == CVSYM_OK);
  EXPECT(fabs(k.rate - 1.26911427657988) < 1e-10);
  EXPECT(cvsym_keyrate(2.0, 0.0, 5.0, 1.0, &k) == CVSYM_ERR_VALIDATION);
}

static void test_group(void) {
  enum { n = 3, d = 2 * n };
  double r[d * d];
  EXPECT(cvsym_haar_kn(n, 5, r) == CVSYM_OK);
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double dot = 0.0;
      for (int k = 0; k < d; ++k) dot += r[k * d + i] * r[k * d + j];
      worst = fmax(worst, fabs(dot - (i == j)));
    }
  }
  EXPECT(worst < 1e-12);
  EXPECT(cvsym_haar_kn(0, 5, r) == CVSYM_ERR_INVALID_DIMENSION);

  double sx[d], sy[d], tx[d], ty[d], w[d * d], residual = 1.0;
  for (int i = 0; i < d; ++i) {
    sx[i] = sin(1.0 + i);
    sy[i] = cos(2.0 * i);
  }
  for (int i = 0; i < d; ++i) {
    tx[i] = ty[i] = 0.0;
    for (int k = 0; k < d; ++k) {
      tx[i] += r[i * d + k] * sx[k];
      ty[i] += r[i * d + k] * sy[k];
    }
  }
  EXPECT(cvsym_witness(n, sx, sy, tx, ty, w, &residual) == CVSYM_OK);
  EXPECT(residual < 1e-10);
  ty[0] += 1.0;
  EXPECT(cvsym_witness(n, sx, sy, tx, ty, w, NULL) == CVSYM_ERR_PRECONDITION);
}

static void test_config_and_run(void) {
  cvsym_config* c = NULL;
  EXPECT(cvsym_config_default("keyrate-report", &c) == CVSYM_OK);
  EXPECT(cvsym_config_set(c, "modes", "10000") == CVSYM_OK);
  EXPECT(cvsym_config_set(c, "excess_noise", "-1") == CVSYM_ERR_VALIDATION);
  EXPECT(strstr(cvsym_last_error(), "excess_noise") != NULL);
  EXPECT(cvsym_config_set(c, "no_such_key", "1") == CVSYM_ERR_VALIDATION);
  EXPECT(cvsym_config_set_seed(c, 11) == CVSYM_OK);
  EXPECT(cvsym_config_validate(c) == CVSYM_OK);

  char* text = NULL;
  EXPECT(cvsym_config_to_json(c, &text) == CVSYM_OK && strstr(text, "\"modes\": 10000") != NULL);
  cvsym_config* again = NULL;
  EXPECT(cvsym_config_parse(text, NULL, &again) == CVSYM_OK);
  cvsym_config_free(again);
  again = NULL;
  EXPECT(cvsym_config_parse(text, "design-compare", &again) == CVSYM_ERR_VALIDATION);
  EXPECT(again == NULL);
  cvsym_string_free(text);
  EXPECT(cvsym_config_load("/nonexistent/cvsym.json", NULL, &again) == CVSYM_ERR_IO);

  cvsym_report* a = NULL;
  cvsym_report* b = NULL;
  EXPECT(cvsym_run(c, 1, &a) == CVSYM_OK);
  EXPECT(cvsym_run(c, 3, &b) == CVSYM_OK);
  char* ja = NULL;
  char* jb = NULL;
  EXPECT(cvsym_report_to_json(a, 0, &ja) == CVSYM_OK);
  EXPECT(cvsym_report_to_json(b, 0, &jb) == CVSYM_OK);
  EXPECT(ja && jb && strcmp(ja, jb) == 0);
  cvsym_string_free(ja);
  cvsym_string_free(jb);

  double rate = -1.0;
  EXPECT(cvsym_report_metric(a, "/rate_estimated/rate", &rate) == CVSYM_OK && rate >= 0.0);
  EXPECT(cvsym_report_metric(a, "/nope", &rate) == CVSYM_ERR_NOT_FOUND);
  EXPECT(cvsym_report_emit(a, "/proc/cvsym_cannot_write", "json") == CVSYM_ERR_IO);
  EXPECT(cvsym_report_emit(a, NULL, "xml") == CVSYM_ERR_VALIDATION);

  cvsym_report_free(a);
  cvsym_report_free(b);
  cvsym_config_free(c);
  cvsym_config_free(NULL);
  cvsym_report_free(NULL);
}

int main(void) {
  EXPECT(strlen(cvsym_version()) > 0);
  EXPECT(strcmp(cvsym_status_name(CVSYM_ERR_IO), "io") == 0);
  test_numerics();
  test_group();
  test_config_and_run();
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return EXIT_FAILURE;
  }
  printf("C API checks passed\n");
  return EXIT_SUCCESS;
}
