#ifndef FASTCAV_FASTCAV_H
#define FASTCAV_FASTCAV_H

/*
 * C interface to the fastcav library.
 *
 * Every fallible call returns an fcav_status. On failure the message of the
 * most recent error on the calling thread is available from fcav_last_error()
 * until the next failing call on that thread. Objects are opaque handles and
 * are released with their matching *_free function; passing NULL to a free
 * function is a no-op.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(FASTCAV_BUILDING_LIBRARY)
#define FCAV_API __attribute__((visibility("default")))
#else
#define FCAV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fcav_status {
  FCAV_OK = 0,
  FCAV_ERR_IO = 1,
  FCAV_ERR_BAD_MAGIC = 2,
  FCAV_ERR_UNSUPPORTED_VERSION = 3,
  FCAV_ERR_UNSUPPORTED_DTYPE = 4,
  FCAV_ERR_BAD_RANK = 5,
  FCAV_ERR_SHAPE_MISMATCH = 6,
  FCAV_ERR_NON_FINITE = 7,
  FCAV_ERR_OVERFLOW = 8,
  FCAV_ERR_MANIFEST_FORMAT = 9,
  FCAV_ERR_MISSING_FILE = 10,
  FCAV_ERR_DIMENSION_MISMATCH = 11,
  FCAV_ERR_DUPLICATE_NAME = 12,
  FCAV_ERR_ZERO_DIRECTION = 13,
  FCAV_ERR_SINGULAR_COVARIANCE = 14,
  FCAV_ERR_NOT_POSITIVE_DEFINITE = 15,
  FCAV_ERR_INVALID_ARGUMENT = 16,
  FCAV_ERR_WRONG_METHOD = 17,
  FCAV_ERR_EMPTY_INPUT = 18,
  FCAV_ERR_PARALLEL_REFUSED = 19,
  FCAV_ERR_DEGENERATE_GRID = 20,
  /* Invalid call: bad enum value, NULL where an object is required. */
  FCAV_ERR_USAGE = 21,
  FCAV_ERR_INTERNAL = 99
} fcav_status;

typedef enum fcav_method {
  FCAV_METHOD_FASTCAV = 0,
  FCAV_METHOD_SVM_SGD = 1,
  FCAV_METHOD_LDA = 2,
  FCAV_METHOD_RIDGE = 3,
  FCAV_METHOD_LOGREG = 4,
  FCAV_METHOD_SPARSE_LOGREG = 5
} fcav_method;

typedef enum fcav_dtype { FCAV_FLOAT32 = 0, FCAV_FLOAT64 = 1 } fcav_dtype;

typedef enum fcav_lda_solver {
  FCAV_LDA_DIRECT = 0,
  FCAV_LDA_PSEUDO_INVERSE = 1,
  FCAV_LDA_AUTO = 2
} fcav_lda_solver;

typedef struct fcav_matrix fcav_matrix;
typedef struct fcav_cav fcav_cav;

FCAV_API const char* fcav_version(void);
/* Kebab-case name of a status code, e.g. "bad-magic". */
FCAV_API const char* fcav_status_string(fcav_status status);
FCAV_API const char* fcav_last_error(void);

FCAV_API const char* fcav_method_name(fcav_method method);
/* Accepts fastcav, svm (svm_sgd, svm-sgd), lda, ridge, logreg, sparse_logreg. */
FCAV_API fcav_status fcav_method_parse(const char* name, fcav_method* out);

/* ---- Activation matrices ------------------------------------------------ */

/* Copies rows * cols row-major values. Values must be finite. */
FCAV_API fcav_status fcav_matrix_create(size_t rows, size_t cols, const double* values, fcav_matrix** out);
/* Reads a CAVK tensor; rank-1 tensors load as a single row. */
FCAV_API fcav_status fcav_matrix_read(const char* path, fcav_matrix** out);
/* Writes a rank-2 CAVK tensor atomically. */
FCAV_API fcav_status fcav_matrix_write(const fcav_matrix* m, fcav_dtype dtype, const char* path);
FCAV_API void fcav_matrix_free(fcav_matrix* m);
FCAV_API size_t fcav_matrix_rows(const fcav_matrix* m);
FCAV_API size_t fcav_matrix_cols(const fcav_matrix* m);
/* Row-major view, valid until the matrix is freed. */
FCAV_API const double* fcav_matrix_data(const fcav_matrix* m);

/* ---- Fitting ------------------------------------------------------------ */

typedef struct fcav_fit_options {
  unsigned threads;              /* fastcav column reduction workers */
  uint32_t sgd_max_epochs;
  int sgd_constant_rate;         /* nonzero: constant step eta0 */
  double sgd_eta0;
  double sgd_power;              /* inverse-scaling exponent */
  double sgd_lambda;
  double sgd_tolerance;
  uint32_t sgd_patience;
  double lda_ridge;
  fcav_lda_solver lda_solver;
  double ridge_lambda;
  double logreg_lambda;
  double sparse_lambda1;
  uint32_t logreg_epochs;
} fcav_fit_options;

FCAV_API void fcav_fit_options_default(fcav_fit_options* opts);

/* `opts` may be NULL for defaults. `seed` drives SGD shuffling. */
FCAV_API fcav_status fcav_fit(fcav_method method, const fcav_matrix* concept_acts, const fcav_matrix* random_acts,
                              const fcav_fit_options* opts, uint64_t seed, fcav_cav** out);
FCAV_API void fcav_cav_free(fcav_cav* cav);
FCAV_API size_t fcav_cav_dim(const fcav_cav* cav);
FCAV_API const double* fcav_cav_direction(const fcav_cav* cav);
FCAV_API double fcav_cav_intercept(const fcav_cav* cav);
FCAV_API fcav_method fcav_cav_method(const fcav_cav* cav);
FCAV_API double fcav_cav_fit_time(const fcav_cav* cav);
FCAV_API uint32_t fcav_cav_iterations(const fcav_cav* cav);

FCAV_API fcav_status fcav_cav_score(const fcav_cav* cav, const double* x, size_t dim, double* out);
/* Held-out accuracy: concept rows should score > 0, random rows <= 0. */
FCAV_API fcav_status fcav_cav_accuracy(const fcav_cav* cav, const fcav_matrix* concept_acts,
                                       const fcav_matrix* random_acts, double* out);
FCAV_API fcav_status fcav_cav_cosine(const fcav_cav* a, const fcav_cav* b, double* out);
/* Fraction of concept / random rows inside the hinge margin. SVM CAVs only. */
FCAV_API fcav_status fcav_cav_support_ratio(const fcav_cav* cav, const fcav_matrix* concept_acts,
                                            const fcav_matrix* random_acts, double* concept_ratio,
                                            double* random_ratio);
FCAV_API fcav_status fcav_cav_save(const fcav_cav* cav, const char* path);
FCAV_API fcav_status fcav_cav_load(const char* path, fcav_cav** out);

/* Fraction of gradient rows with strictly positive directional derivative. */
FCAV_API fcav_status fcav_tcav_score(const fcav_cav* cav, const fcav_matrix* grads, double* out);

/* ---- File-level runs ---------------------------------------------------- */

typedef void (*fcav_log_fn)(const char* message, void* user);

typedef struct fcav_run_options {
  uint64_t seed;
  int seed_set;          /* zero: use the manifest seed, or the default seed */
  unsigned threads;
  int plot_data;         /* nonzero: also write tidy *_long.csv tables */
  const char* command_line;
  fcav_log_fn log;
  void* log_user;
} fcav_run_options;

FCAV_API void fcav_run_options_default(fcav_run_options* opts);

/* `methods` may be empty to use the manifest's methods. */
FCAV_API fcav_status fcav_run_fit(const char* manifest, const fcav_method* methods, size_t n_methods,
                                  double holdout_fraction, const fcav_fit_options* fit, const char* out_dir,
                                  const fcav_run_options* run);

FCAV_API fcav_status fcav_run_tcav(const char* manifest, const char* gradients_dir, fcav_method method,
                                   double alpha, double correction, const fcav_fit_options* fit,
                                   const char* out_dir, const fcav_run_options* run);

typedef struct fcav_bench_options {
  const fcav_method* methods; /* first entry is the speedup reference */
  size_t n_methods;
  size_t n;
  size_t d;
  uint32_t repeats;
  const char* manifest;       /* optional: benchmark on real activations */
  int evict_cache;
} fcav_bench_options;

FCAV_API void fcav_bench_options_default(fcav_bench_options* opts);
FCAV_API fcav_status fcav_run_bench(const fcav_bench_options* bench, const fcav_fit_options* fit,
                                    const char* out_dir, const fcav_run_options* run);

typedef struct fcav_scaling_options {
  fcav_method method;
  const size_t* n_grid;
  size_t n_grid_len;
  const size_t* d_grid;
  size_t d_grid_len;
  size_t n_fixed;
  size_t d_fixed;
  uint32_t repeats;
  double separation;
  int evict_cache;
} fcav_scaling_options;

/* Grids default to NULL, meaning the built-in grids. */
FCAV_API void fcav_scaling_options_default(fcav_scaling_options* opts);
FCAV_API fcav_status fcav_run_scaling(const fcav_scaling_options* scaling, const fcav_fit_options* fit,
                                      const char* out_dir, const fcav_run_options* run);

typedef struct fcav_sensitivity_options {
  fcav_method method;
  size_t d;
  double separation;
  double sigma;
  const size_t* set_sizes;
  size_t set_sizes_len;
  const size_t* random_set_counts;
  size_t random_set_counts_len;
  size_t random_sets_for_size_panel;
  size_t set_size_for_count_panel;
  size_t n_eval_per_class;
  uint32_t seeds;
} fcav_sensitivity_options;

FCAV_API void fcav_sensitivity_options_default(fcav_sensitivity_options* opts);
FCAV_API fcav_status fcav_run_sensitivity(const fcav_sensitivity_options* sens, const fcav_fit_options* fit,
                                          const char* out_dir, const fcav_run_options* run);

typedef struct fcav_tracking_options {
  fcav_method method;
  double learned_threshold;
  double holdout_fraction;
} fcav_tracking_options;

FCAV_API void fcav_tracking_options_default(fcav_tracking_options* opts);
FCAV_API fcav_status fcav_run_tracking(const char* manifest, const fcav_tracking_options* tracking,
                                       const fcav_fit_options* fit, const char* out_dir,
                                       const fcav_run_options* run);

typedef struct fcav_synth_options {
  size_t d;
  double sigma;
  double separation;
  size_t n_per_set;
  size_t n_concepts;
  size_t n_random_sets;
  const char* const* layers; /* NULL: a single layer named "layer" */
  size_t n_layers;
  size_t epochs;             /* 0: no epoch axis */
  double epoch_step;
  const fcav_method* methods; /* recorded in the manifest */
  size_t n_methods;
  fcav_dtype dtype;
  int write_gradients;
  double gradient_p_align;
  const char* gradient_class;
  size_t gradient_rows;
  const fcav_method* report_methods; /* non-empty: write equivalence.csv */
  size_t n_report_methods;
  uint32_t report_trials;
} fcav_synth_options;

FCAV_API void fcav_synth_options_default(fcav_synth_options* opts);
FCAV_API fcav_status fcav_run_synth(const fcav_synth_options* synth, const char* out_dir,
                                    const fcav_run_options* run);

/* Header summary of each tensor (manifests expand to their files), one line
 * per tensor. The returned string is released with fcav_string_free. */
FCAV_API fcav_status fcav_inspect(const char* const* paths, size_t n_paths, char** out);
FCAV_API void fcav_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
