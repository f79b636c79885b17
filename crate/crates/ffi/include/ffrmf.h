#ifndef FFRMF_H
#define FFRMF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum FfrmfStatus {
  FFRMF_STATUS_OK = 0,
  FFRMF_STATUS_INVALID_ARGUMENT = 1,
  FFRMF_STATUS_UNSUPPORTED_FIELD = 2,
  FFRMF_STATUS_BUDGET_EXCEEDED = 3,
  FFRMF_STATUS_EMPTY_SUPPORT = 4,
  FFRMF_STATUS_NULL_POINTER = 5,
  FFRMF_STATUS_INTERNAL = 6,
} FfrmfStatus;

/**
 * Exact counts `|P_k(n)|` for one field order.
 */
typedef struct FfrmfCountTable FfrmfCountTable;

/**
 * `P_k(n)` enumerated once, ready for repeated sampling.
 */
typedef struct FfrmfSampler FfrmfSampler;

/**
 * Moments and KS distance of one Monte Carlo run.
 */
typedef struct FfrmfSampleStats {
  uint64_t trials;
  double mean;
  double variance;
  double skewness;
  double excess_kurtosis;
  /**
   * NaN when fewer than 100 trials were run.
   */
  double ks_distance;
} FfrmfSampleStats;

/**
 * Exact count against the Sathe-Selberg main term.
 */
typedef struct FfrmfAsymptotic {
  double exact_log;
  double predicted_log;
  double relative_deviation;
  double g_value;
  double g_tail_bound;
} FfrmfAsymptotic;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after a
 * success. Valid until the next call into this library on the thread.
 */
const char *ffrmf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ffrmf_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ffrmf_string_free(char *s);

/**
 * Builds exact counts for `k <= k_max`, `n <= n_max` over `F_q`.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum FfrmfStatus ffrmf_count_table_new(uint64_t q,
                                       size_t k_max,
                                       size_t n_max,
                                       struct FfrmfCountTable **out);

/**
 * # Safety
 * `table` must come from [`ffrmf_count_table_new`] and not have been
 * freed. Null is ignored.
 */
void ffrmf_count_table_free(struct FfrmfCountTable *table);

/**
 * `|P_k(n)|` as a decimal string; free it with [`ffrmf_string_free`].
 *
 * # Safety
 * `table` must be a live handle and `out` valid for writing a pointer.
 */
enum FfrmfStatus ffrmf_count_table_count(const struct FfrmfCountTable *table,
                                         size_t k,
                                         size_t n,
                                         char **out);

/**
 * `ln |P_k(n)|`, or negative infinity when the count is zero.
 *
 * # Safety
 * `table` must be a live handle and `out` valid for writing.
 */
enum FfrmfStatus ffrmf_count_table_log_count(const struct FfrmfCountTable *table,
                                             size_t k,
                                             size_t n,
                                             double *out);

/**
 * Natural log of the Hardy-Ramanujan bound
 * `(q^n / n) (log n + 2 - log 2)^{k-1} / (k-1)!`.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum FfrmfStatus ffrmf_hr_bound_log(uint64_t q, size_t k, size_t n, double *out);

/**
 * Enumerates `P_k(n)` over `F_q` for sampling.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum FfrmfStatus ffrmf_sampler_new(uint64_t q, size_t k, size_t n, struct FfrmfSampler **out);

/**
 * # Safety
 * `sampler` must come from [`ffrmf_sampler_new`] and not have been freed.
 * Null is ignored.
 */
void ffrmf_sampler_free(struct FfrmfSampler *sampler);

/**
 * `|P_k(n)|`, the number of terms in each sample.
 *
 * # Safety
 * `sampler` must be a live handle and `out` valid for writing.
 */
enum FfrmfStatus ffrmf_sampler_support_size(const struct FfrmfSampler *sampler, size_t *out);

/**
 * Runs `trials` trials with signs derived from `seed`. The result does
 * not depend on the number of worker threads.
 *
 * # Safety
 * `sampler` must be a live handle and `out` valid for writing.
 */
enum FfrmfStatus ffrmf_sampler_run(const struct FfrmfSampler *sampler,
                                   uint64_t trials,
                                   uint64_t seed,
                                   struct FfrmfSampleStats *out);

/**
 * Compares `|P_k(n)|` with the Sathe-Selberg main term, using an Euler
 * product truncated at degree `truncation`.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum FfrmfStatus ffrmf_sathe_selberg(uint64_t q,
                                     size_t k,
                                     size_t n,
                                     size_t truncation,
                                     struct FfrmfAsymptotic *out);

/**
 * `(sum_d |P_{k,d}|^2 + I-chain + J-chain) / |P_k(n)|^2`.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum FfrmfStatus ffrmf_three_sums_ratio(uint64_t q, size_t k, size_t n, double *out);

/**
 * `Γ(z)` for `z > 0`.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum FfrmfStatus ffrmf_gamma(double z, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FFRMF_H */
