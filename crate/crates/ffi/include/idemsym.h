#ifndef IDEMSYM_H
#define IDEMSYM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum IdsStatus {
  IDS_STATUS_OK = 0,
  IDS_STATUS_NULL_POINTER = 1,
  IDS_STATUS_INVALID_ARGUMENT = 2,
  IDS_STATUS_NOT_SQUARE = 3,
  IDS_STATUS_NON_FINITE = 4,
  IDS_STATUS_NOT_IDEMPOTENT = 5,
  IDS_STATUS_NOT_SYMMETRY = 6,
  IDS_STATUS_NOT_UNITARY = 7,
  IDS_STATUS_SHAPE_MISMATCH = 8,
  IDS_STATUS_NOT_EXISTS = 9,
  IDS_STATUS_NOT_MEMBER = 10,
  IDS_STATUS_NUMERICAL = 11,
  IDS_STATUS_PANIC = 12,
} IdsStatus;

/**
 * Opaque dense complex matrix.
 */
typedef struct IdsMatrix IdsMatrix;

/**
 * Thresholds for approximate checks; see `ids_tolerance_default`.
 */
typedef struct IdsTolerance {
  double rank_rtol;
  double residual_atol;
  double psd_tol;
} IdsTolerance;

/**
 * Relations of a symmetry `J` against an idempotent `P`.
 */
typedef struct IdsMembership {
  bool is_symmetry;
  bool in_gamma;
  bool in_delta;
  bool positive;
  double symmetry_residual;
  double gamma_residual;
  double delta_residual;
  double min_eigenvalue;
} IdsMembership;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default thresholds.
 */
struct IdsTolerance ids_tolerance_default(void);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *ids_last_error_message(void);

/**
 * Creates a `rows x cols` matrix from interleaved row-major data, or zeros
 * when `data` is null. Returns null on non-finite data.
 *
 * # Safety
 * `data` must be null or point to `2 * rows * cols` readable doubles.
 */
struct IdsMatrix *ids_matrix_new(size_t rows, size_t cols, const double *data);

/**
 * Releases a matrix. Null is ignored.
 *
 * # Safety
 * `m` must be null or a handle from this library not yet freed.
 */
void ids_matrix_free(struct IdsMatrix *m);

/**
 * Row count, or 0 for null.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t ids_matrix_rows(const struct IdsMatrix *m);

/**
 * Column count, or 0 for null.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t ids_matrix_cols(const struct IdsMatrix *m);

/**
 * Copies the entries into `out` (interleaved, row-major). `len` is the
 * capacity of `out` in doubles and must be at least `2 * rows * cols`.
 *
 * # Safety
 * `m` must be a live handle and `out` must point to `len` writable doubles.
 */
enum IdsStatus ids_matrix_copy_data(const struct IdsMatrix *m, double *out, size_t len);

/**
 * Random idempotent of rank `r` on `C^n` with corner norm at most `norm_cap`.
 *
 * # Safety
 * `out` must point to writable storage for one handle.
 */
enum IdsStatus ids_random_idempotent(size_t n,
                                     size_t r,
                                     double norm_cap,
                                     uint64_t seed,
                                     struct IdsMatrix **out);

/**
 * `IDS_STATUS_OK` when `p` is idempotent under `tol`.
 *
 * # Safety
 * `p` must be a live handle; `tol` null or valid.
 */
enum IdsStatus ids_validate_idempotent(const struct IdsMatrix *p, const struct IdsTolerance *tol);

/**
 * `dim N(P+P*)` and `dim N(2I-P-P*)`.
 *
 * # Safety
 * `p` must be a live handle; `tol` null or valid; outputs writable.
 */
enum IdsStatus ids_kernel_dims(const struct IdsMatrix *p,
                               const struct IdsTolerance *tol,
                               size_t *d_plus,
                               size_t *d_minus);

/**
 * Whether symmetries with `JPJ = I - P` exist.
 *
 * # Safety
 * `p` must be a live handle; `tol` null or valid; `out` writable.
 */
enum IdsStatus ids_gamma_exists(const struct IdsMatrix *p,
                                const struct IdsTolerance *tol,
                                bool *out);

/**
 * Canonical `J` with `JPJ = I - P`; `IDS_STATUS_NOT_EXISTS` when none exists.
 *
 * # Safety
 * `p` must be a live handle; `tol` null or valid; `out` writable.
 */
enum IdsStatus ids_canonical_gamma(const struct IdsMatrix *p,
                                   const struct IdsTolerance *tol,
                                   struct IdsMatrix **out);

/**
 * Canonical `J` with `JPJ = I - P*`.
 *
 * # Safety
 * `p` must be a live handle; `tol` null or valid; `out` writable.
 */
enum IdsStatus ids_canonical_delta(const struct IdsMatrix *p,
                                   const struct IdsTolerance *tol,
                                   struct IdsMatrix **out);

/**
 * `(2P - I)|2P - I|^-1`.
 *
 * # Safety
 * `p` must be a live handle; `tol` null or valid; `out` writable.
 */
enum IdsStatus ids_halmos_symmetry(const struct IdsMatrix *p,
                                   const struct IdsTolerance *tol,
                                   struct IdsMatrix **out);

/**
 * Smallest symmetry `J` with `JP >= 0`.
 *
 * # Safety
 * `p` must be a live handle; `tol` null or valid; `out` writable.
 */
enum IdsStatus ids_min_positive_symmetry(const struct IdsMatrix *p,
                                         const struct IdsTolerance *tol,
                                         struct IdsMatrix **out);

/**
 * Relations of `j` against `p`.
 *
 * # Safety
 * `p` and `j` must be live handles; `tol` null or valid; `out` writable.
 */
enum IdsStatus ids_membership(const struct IdsMatrix *p,
                              const struct IdsMatrix *j,
                              const struct IdsTolerance *tol,
                              struct IdsMembership *out);

/**
 * Factors `J` with `JPJ = I - P*` as `J = -i J1 J2`. `residual` may be null.
 *
 * # Safety
 * `p` and `j` must be live handles; `tol` null or valid; `j1`, `j2` writable.
 */
enum IdsStatus ids_delta_decompose(const struct IdsMatrix *p,
                                   const struct IdsMatrix *j,
                                   const struct IdsTolerance *tol,
                                   struct IdsMatrix **j1,
                                   struct IdsMatrix **j2,
                                   double *residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IDEMSYM_H */
