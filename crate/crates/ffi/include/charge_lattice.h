/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CHARGE_LATTICE_H
#define CHARGE_LATTICE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum cl_status {
  CL_STATUS_OK = 0,
  /**
   * Null pointer, bad UTF-8, or an argument out of range.
   */
  CL_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed JSON input.
   */
  CL_STATUS_PARSE = 2,
  /**
   * The boxes do not form a partition.
   */
  CL_STATUS_MELTING_RULE = 3,
  /**
   * Dimension or hypercube size not supported.
   */
  CL_STATUS_UNSUPPORTED = 4,
  /**
   * Work estimate above the configured limit.
   */
  CL_STATUS_WORK_LIMIT = 5,
  /**
   * Weights were not generic for the requested check.
   */
  CL_STATUS_GENERICITY = 6,
  /**
   * A Rust panic was caught.
   */
  CL_STATUS_PANIC = 7,
} cl_status;

/**
 * Sampling method for [`cl_run_mc`].
 */
typedef enum cl_sample_method {
  CL_SAMPLE_METHOD_SEQUENTIAL = 0,
  CL_SAMPLE_METHOD_CHAIN = 1,
} cl_sample_method;

/**
 * Opaque pole-ledger handle.
 */
typedef struct cl_ledger cl_ledger;

/**
 * Opaque partition handle.
 */
typedef struct cl_partition cl_partition;

/**
 * Outcome of [`cl_verify_lemma`].
 */
typedef struct cl_lemma_summary {
  uint64_t total_configs;
  uint64_t members;
  uint64_t violations;
  uint64_t characterization_mismatches;
} cl_lemma_summary;

/**
 * Outcome of [`cl_run_mc`].
 */
typedef struct cl_mc_summary {
  uint64_t samples;
  int32_t max_omega;
  uint64_t above_bound;
  uint64_t boundary_failures;
  bool passed;
} cl_mc_summary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *cl_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *cl_version(void);

/**
 * Parses `{"n": int, "boxes": [[...], ...]}` and checks the melting rule.
 *
 * # Safety
 * `json` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum cl_status cl_partition_from_json(const char *json, struct cl_partition **out);

/**
 * # Safety
 * `p` must be null or a handle from [`cl_partition_from_json`] not yet freed.
 */
void cl_partition_free(struct cl_partition *p);

/**
 * Dimension of the partition, 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t cl_partition_dimension(const struct cl_partition *p);

/**
 * Number of boxes, 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t cl_partition_len(const struct cl_partition *p);

/**
 * Builds the pole ledger of the partition.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum cl_status cl_ledger_build(const struct cl_partition *p, struct cl_ledger **out);

/**
 * # Safety
 * `l` must be null or a handle from [`cl_ledger_build`] not yet freed.
 */
void cl_ledger_free(struct cl_ledger *l);

/**
 * Number of projected points with non-zero order, 0 for a null handle.
 *
 * # Safety
 * `l` must be null or a live handle.
 */
size_t cl_ledger_len(const struct cl_ledger *l);

/**
 * Copies entry `index` (in lexicographic order of the projected point)
 * into `coords[0..n]` and `*order`. `coords_len` must be at least `n`.
 *
 * # Safety
 * `l` must be a live handle, `coords` valid for `coords_len` writes and
 * `order` a valid pointer.
 */
enum cl_status cl_ledger_entry(const struct cl_ledger *l,
                               size_t index,
                               int32_t *coords,
                               size_t coords_len,
                               int32_t *order);

/**
 * Net pole order at the projected point of the lattice vector `l[0..n]`.
 *
 * # Safety
 * `ledger` must be a live handle, `l` valid for `n` reads and `order` a
 * valid pointer.
 */
enum cl_status cl_ledger_pole_order(const struct cl_ledger *ledger,
                                    const int32_t *l,
                                    size_t n,
                                    int32_t *order);

/**
 * Serializes the ledger as `{"n": int, "entries": [{"l": [...], "order": int}]}`.
 * The string must be released with [`cl_string_free`].
 *
 * # Safety
 * `l` must be a live handle and `out` a valid pointer.
 */
enum cl_status cl_ledger_to_json(const struct cl_ledger *l, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void cl_string_free(char *s);

/**
 * Checks that every pole is simple and that poles correspond one to one
 * with projected addable and removable boxes.
 *
 * # Safety
 * `p` must be a live handle; the output pointers must be valid.
 */
enum cl_status cl_verify_properties(const struct cl_partition *p,
                                    bool *simple_poles,
                                    bool *bijection);

/**
 * Compares the ledger with the rational-root expansion under the generic
 * weights drawn from `seed`.
 *
 * # Safety
 * `p` must be a live handle and `matches` a valid pointer.
 */
enum cl_status cl_oracle_check(const struct cl_partition *p, uint64_t seed, bool *matches);

/**
 * Number of down-sets of the `d`-dimensional Boolean hypercube, `d <= 6`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum cl_status cl_count_downsets(size_t d, size_t jobs, uint64_t *out);

/**
 * Exhaustive pole-order check at the top of `HC^(d)` in dimension `n`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum cl_status cl_verify_lemma(size_t n, size_t d, size_t jobs, struct cl_lemma_summary *out);

/**
 * Monte Carlo check with `per_n` samples at every box count.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum cl_status cl_run_mc(size_t n,
                         size_t d,
                         size_t per_n,
                         uint64_t seed,
                         enum cl_sample_method method,
                         size_t jobs,
                         struct cl_mc_summary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARGE_LATTICE_H */
