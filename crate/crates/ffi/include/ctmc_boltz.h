#ifndef CTMC_BOLTZ_H
#define CTMC_BOLTZ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

typedef enum CbzStatus {
  CBZ_STATUS_OK = 0,
  CBZ_STATUS_INVALID_INPUT = 1,
  CBZ_STATUS_DEGENERATE = 2,
  CBZ_STATUS_NOT_IRREDUCIBLE = 3,
  CBZ_STATUS_NULL_POINTER = 4,
  CBZ_STATUS_BUFFER_TOO_SMALL = 5,
  CBZ_STATUS_SOLVE_FAILURE = 6,
} CbzStatus;

typedef enum CbzExample {
  CBZ_EXAMPLE_Q1 = 1,
  CBZ_EXAMPLE_Q2 = 2,
} CbzExample;

/**
 * Opaque handle to a validated rate matrix.
 */
typedef struct CbzRateMatrix CbzRateMatrix;

/**
 * Summary statistics of an analysis, without the per-state table.
 */
typedef struct CbzReport {
  uintptr_t n;
  double rho;
  double rho_tilde;
  double r2;
  double m_star;
  double b_star;
  double error_e;
  double var_log_q;
  double var_log_pi;
  double var_log_psi;
  double k_bound;
  double k_observed;
  double pairwise_ratio;
  double pairwise_bound;
  bool k_bound_ok;
  bool pairwise_bound_ok;
} CbzReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *cbz_last_error_message(void);

/**
 * Builds a chain from an `n * n` row-major array of rates. The diagonal
 * is ignored.
 *
 * # Safety
 * `rates` must point to `n * n` readable doubles and `out` must be writable.
 */
enum CbzStatus cbz_rate_matrix_new(const double *rates, uintptr_t n, struct CbzRateMatrix **out);

/**
 * Parses a `ctmc` chain file.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` must be writable.
 */
enum CbzStatus cbz_rate_matrix_parse(const char *text, struct CbzRateMatrix **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum CbzStatus cbz_example_chain(enum CbzExample which, struct CbzRateMatrix **out);

/**
 * Lifted cyclic doubly stochastic chain with the given `n` exit rates.
 *
 * # Safety
 * `exit_rates` must point to `n` readable doubles and `out` must be writable.
 */
enum CbzStatus cbz_lifted_cyclic_chain(uintptr_t n,
                                       const double *exit_rates,
                                       struct CbzRateMatrix **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum CbzStatus cbz_random_iid_chain(uintptr_t n,
                                    double low,
                                    double high,
                                    uint64_t seed,
                                    struct CbzRateMatrix **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum CbzStatus cbz_random_heavy_tail_chain(uintptr_t n,
                                           double width,
                                           uint64_t seed,
                                           struct CbzRateMatrix **out);

/**
 * # Safety
 * `m` must be NULL or a handle from this library that has not been freed.
 */
void cbz_rate_matrix_free(struct CbzRateMatrix *m);

/**
 * State count, or 0 for a NULL handle.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
uintptr_t cbz_rate_matrix_n(const struct CbzRateMatrix *m);

/**
 * # Safety
 * `m` must be a live handle; `out` must hold `len` doubles.
 */
enum CbzStatus cbz_exit_rates(const struct CbzRateMatrix *m, double *out, uintptr_t len);

/**
 * Stationary distribution of the chain.
 *
 * # Safety
 * `m` must be a live handle; `out` must hold `len` doubles.
 */
enum CbzStatus cbz_stationary(const struct CbzRateMatrix *m, double *out, uintptr_t len);

/**
 * Stationary distribution of the embedded jump chain.
 *
 * # Safety
 * `m` must be a live handle; `out` must hold `len` doubles.
 */
enum CbzStatus cbz_jump_stationary(const struct CbzRateMatrix *m, double *out, uintptr_t len);

/**
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum CbzStatus cbz_analyze(const struct CbzRateMatrix *m, struct CbzReport *out);

/**
 * Force around the cycle `states[0] -> ... -> states[len-1] -> states[0]`.
 *
 * # Safety
 * `m` must be a live handle, `states` must hold `len` values and `out`
 * must be writable.
 */
enum CbzStatus cbz_cycle_force(const struct CbzRateMatrix *m,
                               const uintptr_t *states,
                               uintptr_t len,
                               double *out);

/**
 * Averaged occupation fractions and jump frequencies over `replicas`
 * seeded replicas of `jumps` segments each.
 *
 * # Safety
 * `m` must be a live handle; `occupation` and `jump_frequencies` must each
 * hold `len` doubles.
 */
enum CbzStatus cbz_simulate(const struct CbzRateMatrix *m,
                            uintptr_t start,
                            uintptr_t jumps,
                            uint64_t seed,
                            uintptr_t replicas,
                            double *occupation,
                            double *jump_frequencies,
                            uintptr_t len);

/**
 * `(1 + rho_tilde r) / sqrt(1 + 2 rho_tilde r + r^2)` with `r = sqrt(r2)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CbzStatus cbz_predicted_rho(double rho_tilde, double r2, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTMC_BOLTZ_H */
