#ifndef XJACOBI_H
#define XJACOBI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum XjStatus {
  XJ_STATUS_OK = 0,
  XJ_STATUS_NULL_POINTER = 1,
  XJ_STATUS_INVALID_ARGUMENT = 2,
  XJ_STATUS_INVALID_PARAMS = 3,
  XJ_STATUS_DEGENERATE_FAMILY = 4,
  XJ_STATUS_BELOW_GAP = 5,
  XJ_STATUS_DOMAIN_VIOLATION = 6,
  XJ_STATUS_NOT_INVARIANT = 7,
  XJ_STATUS_NON_CONVERGENT = 8,
  XJ_STATUS_QUADRATURE = 9,
  XJ_STATUS_BUFFER_TOO_SMALL = 10,
  XJ_STATUS_INTERNAL = 11,
} XjStatus;

typedef enum XjEndpoint {
  XJ_ENDPOINT_MINUS = 0,
  XJ_ENDPOINT_PLUS = 1,
} XjEndpoint;

typedef enum XjEndpointClass {
  XJ_ENDPOINT_CLASS_LIMIT_POINT = 0,
  XJ_ENDPOINT_CLASS_LIMIT_CIRCLE = 1,
} XjEndpointClass;

/**
 * Opaque family handle.
 */
typedef struct XjFamily XjFamily;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
size_t xj_last_error_message(char *buf, size_t cap);

/**
 * Creates a family from `alpha = alpha_num/alpha_den`, `beta = beta_num/beta_den`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum XjStatus xj_family_new(int64_t alpha_num,
                            int64_t alpha_den,
                            int64_t beta_num,
                            int64_t beta_den,
                            uint32_t m,
                            struct XjFamily **out);

/**
 * Creates a family from textual parameters such as `"7/2"` or `"-0.25"`.
 *
 * # Safety
 * `alpha` and `beta` must be NUL-terminated strings; `out` must be valid for
 * a pointer write.
 */
enum XjStatus xj_family_new_str(const char *alpha,
                                const char *beta,
                                uint32_t m,
                                struct XjFamily **out);

/**
 * Releases a family. Null is ignored.
 *
 * # Safety
 * `family` must be null or come from `xj_family_new*` and not be freed twice.
 */
void xj_family_free(struct XjFamily *family);

/**
 * Codimension of the family, 0 for a null handle.
 *
 * # Safety
 * `family` must be null or a live handle.
 */
uint32_t xj_family_m(const struct XjFamily *family);

/**
 * Evaluates the degree-`n` member at `x`.
 *
 * # Safety
 * `family` must be a live handle; `out` valid for a write.
 */
enum XjStatus xj_eval(const struct XjFamily *family, uint32_t n, double x, double *out);

/**
 * Monomial coefficients (ascending) of the degree-`n` member as doubles.
 * `len` receives the coefficient count; fails with `BUFFER_TOO_SMALL` when
 * `cap` is less than that.
 *
 * # Safety
 * `family` must be a live handle; `coeffs` valid for `cap` doubles; `len`
 * valid for a write.
 */
enum XjStatus xj_coeffs(const struct XjFamily *family,
                        uint32_t n,
                        double *coeffs,
                        size_t cap,
                        size_t *len);

/**
 * Exact coefficients as space-separated `p/q` text. `needed` receives the
 * buffer size required including the NUL.
 *
 * # Safety
 * `family` must be a live handle; `buf` valid for `cap` bytes; `needed` null
 * or valid for a write.
 */
enum XjStatus xj_coeffs_exact(const struct XjFamily *family,
                              uint32_t n,
                              char *buf,
                              size_t cap,
                              size_t *needed);

/**
 * Eigenvalue of the degree-`n` member.
 *
 * # Safety
 * `family` must be a live handle; `out` valid for a write.
 */
enum XjStatus xj_eigenvalue(const struct XjFamily *family, uint32_t n, double *out);

/**
 * Orthogonality weight at `x` in the open interval `(-1, 1)`.
 *
 * # Safety
 * `family` must be a live handle; `out` valid for a write.
 */
enum XjStatus xj_weight(const struct XjFamily *family, double x, double *out);

/**
 * Limit-point / limit-circle classification at an endpoint.
 *
 * # Safety
 * `family` must be a live handle; `out` valid for a write.
 */
enum XjStatus xj_classify(const struct XjFamily *family,
                          enum XjEndpoint endpoint,
                          enum XjEndpointClass *out);

/**
 * Deficiency index `k`, meaning the pair `(k, k)`.
 *
 * # Safety
 * `family` must be a live handle; `out` valid for a write.
 */
enum XjStatus xj_deficiency(const struct XjFamily *family, uint32_t *out);

/**
 * `n`-point Gauss-Jacobi rule for `(1-x)^a (1+x)^b` on `(-1, 1)`.
 *
 * # Safety
 * `nodes` and `weights` must each be valid for `n` doubles.
 */
enum XjStatus xj_gauss_jacobi(double a, double b, size_t n, double *nodes, double *weights);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XJACOBI_H */
