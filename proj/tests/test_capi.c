/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "pmi/pmi_c.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static int count_lines(const char* s) {
  int n = 0;
  for (; *s; ++s)
    if (*s == '\n') ++n;
  return n;
}

int main(int argc, char** argv) {
  const char* tmpdir = argc > 1 ? argv[1] : ".";
  pmi_options opt;
  pmi_options_init(&opt);
  EXPECT(opt.verify == 1);
  EXPECT(opt.grid_res == 100);
  opt.grid_res = 30;
  opt.samples = 20000;

  EXPECT(strlen(pmi_version()) > 0);
  EXPECT(strcmp(pmi_status_name(PMI_ERR_DEGREE), pmi_status_name(PMI_ERR_SOLVER)) != 0);

  char* names = NULL;
  EXPECT(pmi_example_names(&names) == PMI_OK);
  EXPECT(names && strstr(names, "hermite4-robust") != NULL);
  pmi_string_free(names);

  pmi_problem* pb = NULL;
  EXPECT(pmi_problem_example("no-such-example", &pb) != PMI_OK);
  EXPECT(pb == NULL);
  EXPECT(strlen(pmi_last_error()) > 0);
  EXPECT(pmi_problem_example("planar-box", &pb) == PMI_OK);
  int n = 0, p = 0, m = 0;
  EXPECT(pmi_problem_dims(pb, &n, &p, &m) == PMI_OK);
  EXPECT(n == 2 && p == 0 && m == 2);

  char* text = NULL;
  EXPECT(pmi_problem_print(pb, &text) == PMI_OK);
  pmi_problem* again = NULL;
  EXPECT(pmi_problem_parse(text, &again) == PMI_OK);
  char* text2 = NULL;
  EXPECT(pmi_problem_print(again, &text2) == PMI_OK);
  EXPECT(text && text2 && strcmp(text, text2) == 0);
  pmi_string_free(text);
  pmi_string_free(text2);
  pmi_problem_free(again);

  pmi_problem* bad = NULL;
  EXPECT(pmi_problem_parse("pmi-problem 1\nname x\ndims 2 0 2\nentry 1 1 x7\nend\n", &bad) == PMI_ERR_PARSE);
  EXPECT(pmi_problem_read("/nonexistent/file.pmi", &bad) == PMI_ERR_IO);

  pmi_artifact* a = NULL;
  EXPECT(pmi_solve(pb, 1, "plain", NULL, &opt, &a) == PMI_ERR_DEGREE);
  EXPECT(pmi_solve(pb, 2, "sideways", NULL, &opt, &a) == PMI_ERR_USAGE);
  EXPECT(pmi_solve(pb, 2, "plain", NULL, &opt, &a) == PMI_OK);
  pmi_summary s;
  EXPECT(pmi_artifact_summary(a, &s) == PMI_OK);
  EXPECT(s.degree == 2);
  EXPECT(s.optimal == 1);
  EXPECT(s.has_soundness == 1);
  EXPECT(s.soundness_violations == 0);
  EXPECT(s.verified == 1);
  EXPECT(s.identity_residual <= 1e-6);

  /* g(0) is at most lambda(0) = 1 */
  const double x0[2] = {0.0, 0.0};
  double g0 = 0.0;
  EXPECT(pmi_artifact_eval(a, x0, 2, &g0) == PMI_OK);
  EXPECT(g0 <= 1.0 + 1e-6);
  EXPECT(pmi_artifact_eval(a, x0, 3, &g0) == PMI_ERR_DIMENSION);

  pmi_artifact* nested = NULL;
  EXPECT(pmi_solve(pb, 3, "nested", NULL, &opt, &nested) == PMI_ERR_USAGE);
  EXPECT(pmi_solve(pb, 3, "nested", a, &opt, &nested) == PMI_OK);
  double g1 = 0.0;
  const double x1[2] = {0.1, -0.3};
  EXPECT(pmi_artifact_eval(nested, x1, 2, &g1) == PMI_OK);
  EXPECT(pmi_artifact_eval(a, x1, 2, &g0) == PMI_OK);
  EXPECT(g1 >= g0 - 1e-7);
  pmi_artifact_free(nested);

  char path[4096];
  snprintf(path, sizeof path, "%s/capi_test.art", tmpdir);
  EXPECT(pmi_artifact_write(a, path) == PMI_OK);
  pmi_artifact* back = NULL;
  EXPECT(pmi_artifact_read(path, &back) == PMI_OK);
  char *t1 = NULL, *t2 = NULL;
  EXPECT(pmi_artifact_text(a, &t1) == PMI_OK);
  EXPECT(pmi_artifact_text(back, &t2) == PMI_OK);
  EXPECT(t1 && t2 && strcmp(t1, t2) == 0);
  pmi_artifact* parsed = NULL;
  EXPECT(pmi_artifact_parse(t1, &parsed) == PMI_OK);
  pmi_artifact_free(parsed);
  EXPECT(pmi_artifact_parse("nonsense", &parsed) == PMI_ERR_PARSE);
  pmi_string_free(t1);
  pmi_string_free(t2);
  pmi_artifact_free(back);
  remove(path);

  char* csv = NULL;
  EXPECT(pmi_grid(a, 10, NULL, &csv) == PMI_OK);
  EXPECT(csv && count_lines(csv) == 101);
  pmi_string_free(csv);

  char* json = NULL;
  int verified = 0;
  EXPECT(pmi_verify(a, &opt, &json, &verified) == PMI_OK);
  EXPECT(verified == 1);
  EXPECT(json && strstr(json, "\"verified\": true") != NULL);
  pmi_string_free(json);

  int failed = -1;
  long long violations = -1;
  EXPECT(pmi_sweep(pb, 2, 3, "plain", &opt, &csv, &failed, &violations) == PMI_OK);
  EXPECT(failed == 0 && violations == 0);
  EXPECT(csv && count_lines(csv) == 3);
  pmi_string_free(csv);
  EXPECT(pmi_sweep(pb, 3, 2, "plain", &opt, &csv, NULL, NULL) == PMI_ERR_USAGE);

  EXPECT(pmi_moments(pb, 2, &csv) == PMI_OK);
  pmi_string_free(csv);
  EXPECT(pmi_export_sdp(pb, 2, "plain", NULL, &opt, &csv) == PMI_OK);
  EXPECT(csv && strlen(csv) > 0);
  pmi_string_free(csv);

  opt.grid_res = 1;
  EXPECT(pmi_verify(a, &opt, &json, &verified) == PMI_ERR_USAGE);

  EXPECT(pmi_write_text("/nonexistent/dir/x", "x") == PMI_ERR_IO);
  EXPECT(pmi_solve(NULL, 2, "plain", NULL, &opt, &a) != PMI_OK);

  pmi_artifact_free(a);
  pmi_problem_free(pb);
  pmi_artifact_free(NULL);
  pmi_problem_free(NULL);

  if (failures) {
    fprintf(stderr, "%d C API checks failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
