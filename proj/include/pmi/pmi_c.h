#ifndef PMI_C_H
#define PMI_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PMI_BUILDING_LIBRARY)
#    define PMI_API __declspec(dllexport)
#  else
#    define PMI_API __declspec(dllimport)
#  endif
#else
#  define PMI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status. On failure a message is kept per thread and
   pmi_last_error() returns it until the next failing call. */
typedef enum pmi_status {
  PMI_OK = 0,
  PMI_ERR_USAGE = 1,
  PMI_ERR_PARSE = 2,
  PMI_ERR_DEGREE = 3,
  PMI_ERR_SOLVER = 4,
  PMI_ERR_VERIFY = 5,
  PMI_ERR_IO = 6,
  PMI_ERR_DIMENSION = 7,
  PMI_ERR_GEOMETRY = 8,
  PMI_ERR_INTERNAL = 9
} pmi_status;

typedef struct pmi_problem pmi_problem;
typedef struct pmi_artifact pmi_artifact;

typedef struct pmi_options {
  int has_tol;
  double tol;
  int has_seed;
  uint64_t seed;
  int multiplier_order; /* 0: file option or default */
  int lift_order;       /* raise the order to d0 when d is below it */
  int grid_res;
  long long samples;
  int verify;
  int verbosity;
} pmi_options;

typedef struct pmi_summary {
  int degree;
  int order;
  int iterations;
  int optimal;
  double objective;
  double primal_residual;
  double dual_residual;
  double gap;
  double identity_residual; /* relative */
  double min_gram_eigenvalue;
  int has_soundness;
  long long soundness_tested;
  long long soundness_violations;
  double soundness_worst;
  int has_hessian;
  double hessian_min;
  int verified;
} pmi_summary;

PMI_API const char* pmi_version(void);
PMI_API const char* pmi_status_name(pmi_status status);
PMI_API const char* pmi_last_error(void);
/* Strings returned through char** are malloc'd; release with pmi_string_free. */
PMI_API void pmi_string_free(char* s);

PMI_API void pmi_options_init(pmi_options* options);

PMI_API pmi_status pmi_example_names(char** out);
PMI_API pmi_status pmi_problem_example(const char* name, pmi_problem** out);
PMI_API pmi_status pmi_problem_parse(const char* text, pmi_problem** out);
PMI_API pmi_status pmi_problem_read(const char* path, pmi_problem** out);
PMI_API pmi_status pmi_problem_print(const pmi_problem* problem, char** out);
PMI_API pmi_status pmi_problem_dims(const pmi_problem* problem, int* n, int* p, int* m);
PMI_API void pmi_problem_free(pmi_problem* problem);

/* variant: "plain", "nested", "convex" or "concave"; nested needs prev. */
PMI_API pmi_status pmi_solve(const pmi_problem* problem, int degree, const char* variant, const pmi_artifact* prev,
                             const pmi_options* options, pmi_artifact** out);
/* CSV; *failures counts rows that did not solve, *violations sums the
   soundness violations. Either pointer may be NULL. */
PMI_API pmi_status pmi_sweep(const pmi_problem* problem, int d_min, int d_max, const char* variant,
                             const pmi_options* options, char** csv, int* failures, long long* violations);
PMI_API pmi_status pmi_moments(const pmi_problem* problem, int max_degree, char** out);
PMI_API pmi_status pmi_export_sdp(const pmi_problem* problem, int degree, const char* variant,
                                  const pmi_artifact* prev, const pmi_options* options, char** out);

PMI_API pmi_status pmi_artifact_parse(const char* text, pmi_artifact** out);
PMI_API pmi_status pmi_artifact_read(const char* path, pmi_artifact** out);
PMI_API pmi_status pmi_artifact_write(const pmi_artifact* artifact, const char* path);
PMI_API pmi_status pmi_artifact_text(const pmi_artifact* artifact, char** out);
PMI_API pmi_status pmi_artifact_summary(const pmi_artifact* artifact, pmi_summary* out);
/* g(x) with x of length n. */
PMI_API pmi_status pmi_artifact_eval(const pmi_artifact* artifact, const double* x, size_t n, double* out);
/* section: "x3=0" style, may be NULL or empty for n = 2. */
PMI_API pmi_status pmi_grid(const pmi_artifact* artifact, int res, const char* section, char** csv);
/* Re-runs the checks; *verified is 0 or 1 when not NULL. */
PMI_API pmi_status pmi_verify(const pmi_artifact* artifact, const pmi_options* options, char** json, int* verified);
PMI_API void pmi_artifact_free(pmi_artifact* artifact);

/* Writes text to path, "-" for standard output. */
PMI_API pmi_status pmi_write_text(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif
