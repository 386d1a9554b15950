/*
 * C interface to the mixconc library: mixing coefficients, geometric
 * ergodicity constants, concentration bounds and their Monte Carlo / exact
 * verification for finite Markov and hidden Markov chains.
 *
 * Conventions:
 *   - Every fallible call returns mixconc_status. On failure a message is
 *     available from mixconc_last_error() on the calling thread until the
 *     next failing call on that thread.
 *   - Objects are opaque handles returned through an out parameter and
 *     released with the matching _free function. Freeing NULL is a no-op.
 *   - Kernels cross the boundary in row-per-source layout: row x holds the
 *     distribution of the next state (or emitted symbol) given state x.
 *   - Strings returned through char** are owned by the caller and released
 *     with mixconc_string_free.
 *   - Handles are immutable after creation and may be shared across threads.
 */
#ifndef MIXCONC_H
#define MIXCONC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MIXCONC_API __declspec(dllexport)
#else
#define MIXCONC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mixconc_status {
  MIXCONC_OK = 0,
  MIXCONC_ERR_INVALID_ARGUMENT = 1,
  MIXCONC_ERR_DIMENSION = 2,
  MIXCONC_ERR_NOT_ERGODIC = 3,
  MIXCONC_ERR_ENUMERATION_LIMIT = 4,
  MIXCONC_ERR_NO_CONVERGENCE = 5,
  MIXCONC_ERR_PARSE = 6,
  MIXCONC_ERR_IO = 7,
  MIXCONC_ERR_INTERNAL = 8
} mixconc_status;

typedef enum mixconc_statistic {
  MIXCONC_STAT_SUP_NORM = 0,
  MIXCONC_STAT_TOTAL_VARIATION = 1,
  MIXCONC_STAT_CUSTOM_LIPSCHITZ = 2
} mixconc_statistic;

typedef enum mixconc_format {
  MIXCONC_FORMAT_TEXT = 0,
  MIXCONC_FORMAT_CSV = 1,
  MIXCONC_FORMAT_STRUCTURED = 2
} mixconc_format;

typedef struct mixconc_chain mixconc_chain;
typedef struct mixconc_report mixconc_report;
typedef struct mixconc_lemma_report mixconc_lemma_report;

typedef struct mixconc_ergodicity {
  double G;
  double theta;
  size_t horizon;          /* 0 when the constants were given, not fitted */
  int horizon_too_short;   /* tau at the horizon >= tau_1 / 2 */
} mixconc_ergodicity;

typedef struct mixconc_bound {
  double raw;
  double capped; /* min(1, raw) */
} mixconc_bound;

typedef struct mixconc_lambda {
  double gamma_n;
  double heavy_sqrt_sum;
  double heavy_term;
  double light_sqrt_sum;
  double light_mass_sum;
  double light_term;
  double lambda;
} mixconc_lambda;

typedef struct mixconc_experiment_config {
  size_t n;
  size_t trials;
  uint64_t seed;
  size_t horizon;          /* fit horizon; 0 means 64 */
  unsigned workers;        /* 0 means 1 */
  int stationary;          /* nonzero: start from pi */
  double delta_mc;         /* 0 means 1e-3 */
  mixconc_statistic statistic;
} mixconc_experiment_config;

typedef struct mixconc_report_row {
  double epsilon;
  double threshold;
  uint64_t exceedances;
  double empirical_frequency;
  double mc_halfwidth;
  double bound;
  double bound_raw;
  int satisfied;
} mixconc_report_row;

typedef struct mixconc_report_info {
  size_t n;
  size_t trials;
  uint64_t seed;
  mixconc_statistic statistic;
  double delta_mc;
  int stationary;
  double G;
  double theta;
  double correction;
  size_t rows;
  int all_satisfied;
} mixconc_report_info;

typedef struct mixconc_expectation {
  double estimate;
  double halfwidth;
  double bound;
} mixconc_expectation;

typedef struct mixconc_verify_config {
  uint64_t seed;
  size_t instances;   /* 0 means 200 */
  size_t max_states;  /* 0 means 4 */
  size_t max_length;  /* 0 means 5 */
  size_t horizon;     /* 0 means 64 */
} mixconc_verify_config;

typedef struct mixconc_lemma_check {
  const char* name;   /* valid while the report lives */
  int equality;
  double tolerance;
  size_t checks;
  double worst_gap;
  int passed;
  size_t failing_seed_count;
} mixconc_lemma_check;

/* ---- errors and memory ------------------------------------------------- */

MIXCONC_API const char* mixconc_last_error(void);
MIXCONC_API const char* mixconc_status_name(mixconc_status status);
MIXCONC_API const char* mixconc_version(void);
MIXCONC_API void mixconc_string_free(char* s);

/* ---- chains ------------------------------------------------------------ */

MIXCONC_API mixconc_status mixconc_chain_load_file(const char* path, mixconc_chain** out);
MIXCONC_API mixconc_status mixconc_chain_parse(const char* json_text, const char* name, mixconc_chain** out);
/* initial may be NULL (stationary start); emission_rows may be NULL (symbols ignored). */
MIXCONC_API mixconc_status mixconc_chain_create(size_t states, const double* initial, const double* transition_rows,
                                                size_t symbols, const double* emission_rows, mixconc_chain** out);
MIXCONC_API void mixconc_chain_free(mixconc_chain* chain);
MIXCONC_API size_t mixconc_chain_states(const mixconc_chain* chain);
MIXCONC_API size_t mixconc_chain_symbols(const mixconc_chain* chain);
MIXCONC_API const char* mixconc_chain_name(const mixconc_chain* chain);
MIXCONC_API int mixconc_chain_is_ergodic(const mixconc_chain* chain);
MIXCONC_API mixconc_status mixconc_chain_initial(const mixconc_chain* chain, double* out, size_t len);
/* Stationary law of the hidden chain (len = states) and of the observations (len = symbols). */
MIXCONC_API mixconc_status mixconc_chain_stationary(const mixconc_chain* chain, double* out, size_t len);
MIXCONC_API mixconc_status mixconc_chain_observation_stationary(const mixconc_chain* chain, double* out, size_t len);
/* observations and hidden (nullable) receive n symbol ids each. */
MIXCONC_API mixconc_status mixconc_sample_trajectory(const mixconc_chain* chain, size_t n, uint64_t seed,
                                                     uint32_t* observations, uint32_t* hidden);

/* ---- mixing ------------------------------------------------------------ */

MIXCONC_API mixconc_status mixconc_contraction_coefficient(const mixconc_chain* chain, double* out);
MIXCONC_API mixconc_status mixconc_inverse_mixing_time(const mixconc_chain* chain, size_t s, double* out);
/* tau_table (nullable) receives tau_1..tau_horizon. */
MIXCONC_API mixconc_status mixconc_fit_ergodicity(const mixconc_chain* chain, size_t horizon,
                                                  mixconc_ergodicity* out, double* tau_table);
MIXCONC_API mixconc_status mixconc_eta_bar_exact(const mixconc_chain* chain, size_t n, size_t i, size_t j,
                                                 double* out);
/* Norms of the Delta matrix filled from (G, theta). */
MIXCONC_API mixconc_status mixconc_delta_norms(double G, double theta, size_t n, double* inf_norm, double* two_norm);

/* ---- bounds ------------------------------------------------------------ */

MIXCONC_API mixconc_status mixconc_master_bound(double delta_inf, double delta_2, size_t n, double epsilon,
                                                mixconc_bound* out);
MIXCONC_API mixconc_status mixconc_hmm_concentration_bound(double G, double theta, size_t n, double epsilon,
                                                           double lipschitz, int two_tailed, mixconc_bound* out);
MIXCONC_API mixconc_status mixconc_gamma_n(double G, double theta, size_t n, double* out);
MIXCONC_API mixconc_status mixconc_dkw_bound(double G, double theta, size_t n, double epsilon, double* threshold,
                                             mixconc_bound* tail);
MIXCONC_API mixconc_status mixconc_lambda_n(const double* rho, size_t len, double G, double theta, size_t n,
                                            mixconc_lambda* out);
MIXCONC_API mixconc_status mixconc_uniform_chernoff_bound(const double* rho, size_t len, double G, double theta,
                                                          size_t n, double epsilon, double* threshold,
                                                          mixconc_bound* tail);
MIXCONC_API mixconc_status mixconc_variance_bound(double rho_y, double G, double theta, size_t n, double* out);
MIXCONC_API mixconc_status mixconc_expectation_sup_bound(double G, double theta, size_t n, double* out);
MIXCONC_API mixconc_status mixconc_empirical_mean_drift_bound(double G, double theta, size_t n, double* out);
MIXCONC_API mixconc_status mixconc_nonstationary_correction(const double* pi, const double* pi_prime, size_t len,
                                                            double* out);
MIXCONC_API mixconc_status mixconc_burn_in_steps(double G, double theta, double target, size_t* out);

/* ---- experiments ------------------------------------------------------- */

MIXCONC_API mixconc_status mixconc_deviation_experiment(const mixconc_chain* chain,
                                                        const mixconc_experiment_config* config,
                                                        const double* epsilon_grid, size_t grid_len,
                                                        mixconc_report** out);
MIXCONC_API void mixconc_report_free(mixconc_report* report);
MIXCONC_API mixconc_status mixconc_report_info_get(const mixconc_report* report, mixconc_report_info* out);
MIXCONC_API mixconc_status mixconc_report_row_get(const mixconc_report* report, size_t index,
                                                  mixconc_report_row* out);
MIXCONC_API mixconc_status mixconc_report_serialize(const mixconc_report* report, mixconc_format format, char** out);
/* Reads structured output back into a report. */
MIXCONC_API mixconc_status mixconc_report_parse(const char* structured, mixconc_report** out);
/* 1 when both reports hold identical values, else 0. */
MIXCONC_API int mixconc_report_equal(const mixconc_report* a, const mixconc_report* b);

MIXCONC_API mixconc_status mixconc_expectation_experiment(const mixconc_chain* chain,
                                                          const mixconc_experiment_config* config,
                                                          mixconc_expectation* out);
MIXCONC_API mixconc_status mixconc_exact_mean_drift(const mixconc_chain* chain, size_t n, double* out);
/* within_bounds (nullable) is 1 when both exact rational maxima respect their
 * constants (1 for n * sup-norm, 2 for 2n * TV), decided before rounding. */
MIXCONC_API mixconc_status mixconc_lipschitz_audit(const double* rho, size_t len, size_t n, size_t pairs,
                                                   uint64_t seed, double* max_g_ratio, double* max_h_ratio,
                                                   int* within_bounds);

MIXCONC_API mixconc_status mixconc_verify(const mixconc_verify_config* config, mixconc_lemma_report** out);
MIXCONC_API void mixconc_lemma_report_free(mixconc_lemma_report* report);
MIXCONC_API int mixconc_lemma_report_all_passed(const mixconc_lemma_report* report);
MIXCONC_API size_t mixconc_lemma_report_check_count(const mixconc_lemma_report* report);
MIXCONC_API mixconc_status mixconc_lemma_report_check(const mixconc_lemma_report* report, size_t index,
                                                      mixconc_lemma_check* out);
MIXCONC_API mixconc_status mixconc_lemma_report_serialize(const mixconc_lemma_report* report, mixconc_format format,
                                                          char** out);

#ifdef __cplusplus
}
#endif

#endif /* MIXCONC_H */
