/* C API for the generalized bridge regression library.
 *
 * All functions return br_status; on failure br_last_error() describes the
 * problem for the calling thread. Opaque handles are freed with their
 * matching *_free function; strings and arrays returned through out-pointers
 * are freed with br_string_free / br_array_free.
 */
#ifndef BRIDGEREG_H
#define BRIDGEREG_H

#include <stdint.h>

#if defined(_WIN32)
#define BRIDGEREG_API __declspec(dllexport)
#else
#define BRIDGEREG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  BR_OK = 0,
  BR_ERR_VALIDATION = 1,
  BR_ERR_RUNTIME = 2
} br_status;

BRIDGEREG_API const char* br_version(void);
/* Thread-local message for the most recent failure. */
BRIDGEREG_API const char* br_last_error(void);

BRIDGEREG_API void br_string_free(char* s);
BRIDGEREG_API void br_array_free(double* a);

/* ---- datasets ---- */

typedef struct br_dataset br_dataset;

BRIDGEREG_API br_status br_dataset_create(int64_t n, int64_t p, const double* y,
                                          const double* x_rowmajor, br_dataset** out);
BRIDGEREG_API br_status br_dataset_load_csv(const char* path, const char* response_column,
                                            br_dataset** out);
BRIDGEREG_API br_status br_dataset_save_csv(const br_dataset* d, const char* path,
                                            const char* response_column);
BRIDGEREG_API void br_dataset_free(br_dataset* d);
BRIDGEREG_API int64_t br_dataset_rows(const br_dataset* d);
BRIDGEREG_API int64_t br_dataset_cols(const br_dataset* d);
/* Either out-pointer may be NULL. x is written row-major, n*p entries. */
BRIDGEREG_API br_status br_dataset_get(const br_dataset* d, double* y_out, double* x_rowmajor_out);

/* ---- fitting ---- */

typedef struct {
  double e1, f1, e2, f2;   /* lambda mixture shape/rate */
  double e3, f3;           /* gamma prior shape/rate */
  double k1, k2;           /* alpha range */
  double v_b;              /* RW-MH proposal sd; <= 0 selects the default */
  double target_accept;
  int64_t iterations;
  int64_t burn_in;
  int64_t thin;
  uint64_t seed;
  int adapt_during_burnin; /* 0/1 */
  int penalize_intercept;  /* 0/1 */
  double alpha_fixed;      /* <= 0: alpha is sampled */
  double gamma_fixed;      /* <= 0: gamma is sampled */
} br_options;

BRIDGEREG_API void br_options_defaults(br_options* opts);

typedef struct br_chain br_chain;

BRIDGEREG_API br_status br_fit(const br_dataset* d, const br_options* opts, br_chain** out);
BRIDGEREG_API void br_chain_free(br_chain* c);
BRIDGEREG_API int64_t br_chain_num_draws(const br_chain* c);
BRIDGEREG_API int64_t br_chain_num_coeffs(const br_chain* c);
BRIDGEREG_API br_status br_chain_save_csv(const br_chain* c, const char* path);
BRIDGEREG_API br_status br_chain_load_csv(const char* path, br_chain** out);
/* Either out-pointer may be NULL. */
BRIDGEREG_API br_status br_chain_accept_rates(const br_chain* c, double* beta_rate,
                                              double* alpha_rate);

/* ---- inference ---- */

/* Posterior summary as a JSON document: means, quantiles, selection, ESS,
 * MCSE, acceptance rates. levels may be NULL for the default set. */
BRIDGEREG_API br_status br_summary_json(const br_chain* c, const double* levels, int n_levels,
                                        double select_level, char** json_out);
/* selected must hold num_coeffs entries. */
BRIDGEREG_API br_status br_select(const br_chain* c, double level, int32_t* selected);
/* ess/mcse must hold 3p+2 entries (chain column order); either may be NULL. */
BRIDGEREG_API br_status br_ess(const br_chain* c, double* ess, double* mcse);
/* Posterior predictive summaries at new design rows (row-major, rows x p).
 * mean_out holds rows entries; quantiles_out (may be NULL) holds
 * rows*n_levels entries, row-major. */
BRIDGEREG_API br_status br_predict(const br_chain* c, int64_t rows, int64_t p,
                                   const double* x_rowmajor, uint64_t seed, const double* levels,
                                   int n_levels, double* mean_out, double* quantiles_out);

/* ---- synthetic scenarios ---- */

/* scenario: "I".."VI". beta_true_out receives a malloc'd array of length
 * p+1 (intercept first); may be NULL. */
BRIDGEREG_API br_status br_simulate(const char* scenario, uint64_t seed, br_dataset** train,
                                    br_dataset** test, double** beta_true_out,
                                    int64_t* beta_len_out);
/* methods: comma-separated subset of full,alpha_fixed_1,alpha_fixed_2.
 * Returns a CSV table (method, mean_l2, se_l2, median_mse, se_mse,
 * avg_model_size, exact_recovery_count, coverage95). */
BRIDGEREG_API br_status br_benchmark(const char* scenario, int reps, const char* methods,
                                     const br_options* opts, int workers, char** csv_out);

/* ---- oracle: tail robustness ---- */

/* One-dimensional marginal posterior mean sweep; post_mean and dlogm must
 * hold count entries. */
BRIDGEREG_API br_status br_tailcheck(double e1, double f1, double e2, double f2, double k1,
                                     double k2, const double* ys, int count, double* post_mean,
                                     double* dlogm);

/* ---- consistency experiment ---- */

/* Returns a CSV table (n, p, lambda, mass_outside). */
BRIDGEREG_API br_status br_consistency(double rho, double c_const, double epsilon, double alpha,
                                       const int64_t* n_grid, int n_count, int64_t iterations,
                                       int64_t burn_in, uint64_t seed, char** csv_out);

/* ---- multivariate model ---- */

/* Matrix response fit; Y row-major n x m, X row-major n x p. Outputs are
 * malloc'd: beta_mean p*m (column-major), sigma_mean m*m (column-major);
 * either out may be NULL. */
BRIDGEREG_API br_status br_mv_fit(int64_t n, int64_t m, int64_t p, const double* y_rowmajor,
                                  const double* x_rowmajor, const br_options* opts,
                                  double** beta_mean_out, double** sigma_mean_out);
/* The built-in multivariate example: generates the data, runs the chain and
 * reports max |beta_hat - beta_true|. */
BRIDGEREG_API br_status br_mv_example(uint64_t seed, int64_t iterations, int64_t burn_in,
                                      double* max_abs_diff_out);

#ifdef __cplusplus
}
#endif

#endif /* BRIDGEREG_H */
