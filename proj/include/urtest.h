/* urtest — unit-root testing toolkit, public C API.
 *
 * All functions return URTEST_OK on success; on failure they return an error
 * code and leave a human-readable message in urtest_last_error() (thread
 * local). Objects returned through out-parameters are opaque handles owned by
 * the caller and released with the matching _free function.
 */
#ifndef URTEST_H
#define URTEST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum urtest_status {
  URTEST_OK = 0,
  URTEST_ERR_INVALID = 1,    /* bad argument or unusable input */
  URTEST_ERR_DEGENERATE = 2, /* degenerate series (zero regressor/variance) */
  URTEST_ERR_NUMERIC = 3,    /* numerical failure (eigensolver, factor) */
  URTEST_ERR_PARSE = 4,      /* malformed file or config */
  URTEST_ERR_IO = 5          /* file system failure */
} urtest_status;

const char* urtest_status_name(urtest_status status);

/* Message describing the most recent failure on this thread. */
const char* urtest_last_error(void);

const char* urtest_version(void);

/* ------------------------------------------------------------------ tests */

typedef enum urtest_method {
  URTEST_METHOD_ADF = 0,
  URTEST_METHOD_ARB_ADF = 1,
  URTEST_METHOD_FPP = 2,
  URTEST_METHOD_LPB_PP = 3,
  URTEST_METHOD_CBB_PP = 4
} urtest_method;

/* Name "adf", "arb-adf", "fpp", "lpb-pp" or "cbb-pp"; -1 if unknown. */
int urtest_method_from_name(const char* name);
const char* urtest_method_name(urtest_method method);

typedef struct urtest_test_options {
  uint64_t seed;             /* bootstrap substream root */
  int bootstrap_reps;        /* B */
  double size;               /* nominal test size */
  int bandwidth_fixed;       /* 0 = adaptive scan, 1 = l = ceil(n^exponent) */
  double bandwidth_exponent; /* used when bandwidth_fixed */
  double bandwidth_c;        /* adaptive threshold constant */
  int cv_paths;              /* Dickey-Fuller critical-value simulation size */
  uint64_t cv_seed;
  const char* cache_dir;     /* NULL: no on-disk critical-value cache */
} urtest_test_options;

/* Fills in the defaults: seed 12345, B 500, size 0.05, adaptive bandwidth
 * with c = 2, 100000 critical-value paths with seed 12345, no cache dir. */
void urtest_test_options_init(urtest_test_options* options);

typedef struct urtest_result urtest_result;

/* Runs one unit-root test on y[0..n_obs-1]. Requires n_obs >= 16. */
urtest_status urtest_run_test(urtest_method method, const double* y,
                              size_t n_obs, const urtest_test_options* options,
                              urtest_result** out);

void urtest_result_free(urtest_result* result);

const char* urtest_result_method(const urtest_result* result);
double urtest_result_statistic(const urtest_result* result);
int urtest_result_has_pvalue(const urtest_result* result);
double urtest_result_pvalue(const urtest_result* result);
int urtest_result_reject(const urtest_result* result);

/* Diagnostics (bandwidth, lag order, block length, sigma*^2, ...), sorted by
 * name. */
size_t urtest_result_nuisance_count(const urtest_result* result);
const char* urtest_result_nuisance_name(const urtest_result* result, size_t i);
double urtest_result_nuisance_value(const urtest_result* result, size_t i);
/* Returns 1 and stores the value if `name` is present, else 0. */
int urtest_result_nuisance(const urtest_result* result, const char* name,
                           double* value);

/* ------------------------------------------------------- Monte Carlo study */

typedef struct urtest_mc_table urtest_mc_table;

/* Runs the study described by a flat key-value config file (keys: tests,
 * noises, varphis, n, reps, B, size, master_seed, parallelism). A positive
 * parallelism_override replaces the file's thread count. */
urtest_status urtest_mc_run_file(const char* config_path,
                                 int parallelism_override,
                                 urtest_mc_table** out);

void urtest_mc_table_free(urtest_mc_table* table);

size_t urtest_mc_cell_count(const urtest_mc_table* table);
urtest_status urtest_mc_cell(const urtest_mc_table* table, size_t i,
                             const char** method, const char** noise,
                             double* varphi, double* rate, long* reps);

/* Cells that aborted (>1% failed repetitions); normally zero. */
size_t urtest_mc_error_count(const urtest_mc_table* table);
const char* urtest_mc_error(const urtest_mc_table* table, size_t i);

/* Study protocol echo. */
long urtest_mc_reps(const urtest_mc_table* table);
long urtest_mc_bootstrap_reps(const urtest_mc_table* table);
long urtest_mc_sample_length(const urtest_mc_table* table);
uint64_t urtest_mc_master_seed(const urtest_mc_table* table);

/* Writes <stem>.csv and <stem>.grid.txt. */
urtest_status urtest_mc_write(const urtest_mc_table* table, const char* stem);

/* ------------------------------------------------- DF critical values fmt */

/* Simulated size-quantiles of the no-constant Dickey-Fuller t distribution
 * for samples of length n_obs. Requires paths >= 10000. */
urtest_status urtest_df_critical_values(long n_obs, long paths, uint64_t seed,
                                        const double* sizes, size_t n_sizes,
                                        double* out_quantiles);

/* Same, written to the text cache format (header + size,quantile rows). */
urtest_status urtest_df_critical_values_write(const char* path, long n_obs,
                                              long paths, uint64_t seed,
                                              const double* sizes,
                                              size_t n_sizes);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* URTEST_H */
