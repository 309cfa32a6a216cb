#ifndef CAPMIMO_H
#define CAPMIMO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum CapmimoStatus {
  CAPMIMO_STATUS_OK = 0,
  CAPMIMO_STATUS_NULL_POINTER = 1,
  CAPMIMO_STATUS_INVALID_ARGUMENT = 2,
  CAPMIMO_STATUS_TOO_FEW_POINTS = 3,
  CAPMIMO_STATUS_NOT_HERMITIAN = 4,
  CAPMIMO_STATUS_NOT_POSITIVE_SEMIDEFINITE = 5,
  CAPMIMO_STATUS_NUMERICAL_FAILURE = 6,
  CAPMIMO_STATUS_ZERO_TRACE = 7,
  CAPMIMO_STATUS_BUFFER_TOO_SMALL = 8,
  CAPMIMO_STATUS_PANIC = 99,
} CapmimoStatus;

// Eigenvalues of a continuous-operator reference grid, nonincreasing.
typedef struct CapmimoSpectrum CapmimoSpectrum;

// Scenario plus quadrature settings.
typedef struct CapmimoSystem CapmimoSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a system. `inner_points = 0` selects the default source rule.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum CapmimoStatus capmimo_system_new(double wavelength,
                                      double aperture,
                                      double distance,
                                      double power,
                                      double noise,
                                      size_t inner_points,
                                      struct CapmimoSystem **out);

// # Safety
// `system` must be null or a handle from [`capmimo_system_new`] not yet freed.
void capmimo_system_free(struct CapmimoSystem *system);

// Source-side quadrature size in use.
//
// # Safety
// `system` must be a live handle; `out` writable.
enum CapmimoStatus capmimo_system_inner_points(const struct CapmimoSystem *system, size_t *out);

// `G(r, s)` split into real and imaginary parts.
//
// # Safety
// `system` must be a live handle; `out_re` and `out_im` writable.
enum CapmimoStatus capmimo_green_scalar(const struct CapmimoSystem *system,
                                        double r,
                                        double s,
                                        double *out_re,
                                        double *out_im);

// `∫ K_E(r, r) dr` on `outer_points` receiver samples.
//
// # Safety
// `system` must be a live handle; `out` writable.
enum CapmimoStatus capmimo_operator_trace(const struct CapmimoSystem *system,
                                          size_t outer_points,
                                          double *out);

// Continuous-aperture mutual information in nats.
//
// # Safety
// `system` must be a live handle; `out` writable.
enum CapmimoStatus capmimo_mi_continuous(const struct CapmimoSystem *system,
                                         size_t ref_m,
                                         double *out);

// Discrete-receiver mutual information in nats; `out_noise` may be null.
//
// # Safety
// `system` must be a live handle; `out` writable; `out_noise` null or writable.
enum CapmimoStatus capmimo_mi_discrete_rx(const struct CapmimoSystem *system,
                                          size_t m,
                                          double *out,
                                          double *out_noise);

// Discrete-transceiver mutual information in nats; `out_noise` may be null.
//
// # Safety
// `system` must be a live handle; `out` writable; `out_noise` null or writable.
enum CapmimoStatus capmimo_mi_discrete_trx(const struct CapmimoSystem *system,
                                           size_t m1,
                                           size_t m2,
                                           double *out,
                                           double *out_noise);

// Eigenvalue count above `threshold_rel · λ_max` (`threshold_rel ≤ 0`
// selects the default) and the analytic estimate.
//
// # Safety
// `system` must be a live handle; `out_count` and `out_analytic` writable.
enum CapmimoStatus capmimo_dof_estimate(const struct CapmimoSystem *system,
                                        size_t ref_m,
                                        double threshold_rel,
                                        size_t *out_count,
                                        double *out_analytic);

// Computes the reference spectrum on `ref_m` points.
//
// # Safety
// `system` must be a live handle; `out` writable.
enum CapmimoStatus capmimo_spectrum_new(const struct CapmimoSystem *system,
                                        size_t ref_m,
                                        struct CapmimoSpectrum **out);

// # Safety
// `spectrum` must be null or a handle from [`capmimo_spectrum_new`] not yet freed.
void capmimo_spectrum_free(struct CapmimoSpectrum *spectrum);

// Number of eigenvalues; 0 for a null handle.
//
// # Safety
// `spectrum` must be null or a live handle.
size_t capmimo_spectrum_len(const struct CapmimoSpectrum *spectrum);

// Number of eigenvalues raised to zero; 0 for a null handle.
//
// # Safety
// `spectrum` must be null or a live handle.
size_t capmimo_spectrum_clamped_count(const struct CapmimoSpectrum *spectrum);

// Copies operator eigenvalues (matrix eigenvalues times the grid weight)
// into `buf`, which must hold at least [`capmimo_spectrum_len`] values.
//
// # Safety
// `spectrum` must be a live handle; `buf` must be valid for `capacity` writes.
enum CapmimoStatus capmimo_spectrum_copy(const struct CapmimoSpectrum *spectrum,
                                         double *buf,
                                         size_t capacity);

// Message of the last failure on this thread, or an empty string. The
// pointer stays valid until the next failing call on the same thread.
const char *capmimo_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *capmimo_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAPMIMO_H */
