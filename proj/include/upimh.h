/* C interface to the upimh library: unbiased smoothing, filtering and
 * static-posterior estimation with coupled particle independent
 * Metropolis-Hastings.
 *
 * All entry points return UPIMH_OK (0) on success or a nonzero error
 * code; upimh_last_error() describes the most recent failure on the
 * calling thread. Objects are created behind opaque handles and must be
 * released with the matching *_free function.
 */
#ifndef UPIMH_H
#define UPIMH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  UPIMH_OK = 0,
  UPIMH_EINVAL = 1,   /* bad argument (null handle, domain error, ...) */
  UPIMH_ECONFIG = 2,  /* malformed or inconsistent configuration */
  UPIMH_EIO = 3,      /* file could not be read or written */
  UPIMH_ERUNTIME = 4, /* numerical or runtime failure inside an experiment */
};

const char* upimh_version(void);

/* Message for the last failure on this thread; empty string if none. */
const char* upimh_last_error(void);

/* ------------------------------------------------------------------ */
/* Experiments                                                         */

typedef struct upimh_experiment upimh_experiment;
typedef struct upimh_result upimh_result;
typedef struct upimh_table upimh_table;

/* Creates an experiment from JSON config text (NULL or "" for defaults). */
int upimh_experiment_create(const char* config_json, upimh_experiment** out);
int upimh_experiment_create_from_file(const char* path, upimh_experiment** out);
void upimh_experiment_free(upimh_experiment* experiment);

/* Overrides one config key; `json_value` is a JSON-encoded value and
 * `key` a top-level name or a dotted path such as "model.horizon". */
int upimh_experiment_set(upimh_experiment* experiment, const char* key,
                         const char* json_value);

/* Runs the experiment; the result owns one main table plus optional
 * two-column side tables for plotting. */
int upimh_experiment_run(const upimh_experiment* experiment, upimh_result** out);
void upimh_result_free(upimh_result* result);

/* Borrowed table pointers; valid until the result is freed. */
int upimh_result_table(const upimh_result* result, const upimh_table** out);
int upimh_result_num_plots(const upimh_result* result, size_t* out);
int upimh_result_plot_name(const upimh_result* result, size_t index,
                           const char** out);
int upimh_result_plot_table(const upimh_result* result, size_t index,
                            const upimh_table** out);

int upimh_table_num_rows(const upimh_table* table, size_t* out);
int upimh_table_num_cols(const upimh_table* table, size_t* out);
int upimh_table_column_name(const upimh_table* table, size_t col, const char** out);
int upimh_table_value(const upimh_table* table, size_t row, size_t col, double* out);
int upimh_table_write_csv(const upimh_table* table, const char* path);

/* ------------------------------------------------------------------ */
/* Large-sample meeting-time formulas                                  */

/* Average acceptance probability from log-error z at noise level sigma. */
int upimh_alpha_sigma(double z, double sigma, double* out);

/* P[tau = 1] in closed form. */
int upimh_tau_one_closed(double sigma, double* out);

/* P[tau = n] by quadrature. */
int upimh_tau_pmf(int n, double sigma, double* out);

/* E[tau]. */
int upimh_expected_tau(double sigma, double* out);

/* Particle count rescaled so the log-likelihood noise hits sigma = 0.92. */
int upimh_recommend_n(long pilot_n, double sigma_hat, long* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* UPIMH_H */
