#ifndef FOURPHOTON_H
#define FOURPHOTON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

enum FpCurveKind
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  FP_CURVE_KIND_PROBABILITY = 0,
  FP_CURVE_KIND_CORRELATION = 1,
};
#ifndef __cplusplus
typedef int32_t FpCurveKind;
#endif // __cplusplus

enum FpScoring
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  FP_SCORING_ALL_CORRECT = 0,
  FP_SCORING_WORST_PARTY = 1,
};
#ifndef __cplusplus
typedef int32_t FpScoring;
#endif // __cplusplus

// Result code of every fallible call. Zero is success.
enum FpStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_POINTER = -1,
  FP_STATUS_INVALID_ARGUMENT = -2,
  FP_STATUS_BUFFER_TOO_SMALL = -3,
  FP_STATUS_ODD_PARITY = -4,
  FP_STATUS_WEIGHT_OUT_OF_RANGE = -5,
  FP_STATUS_GRID_TOO_SMALL = -6,
  FP_STATUS_DEGENERATE_FIT = -7,
  FP_STATUS_UNDEFINED_VISIBILITY = -8,
  FP_STATUS_OVERFLOW = -9,
  FP_STATUS_INTERNAL = -99,
};
#ifndef __cplusplus
typedef int32_t FpStatus;
#endif // __cplusplus

// Opaque four-qubit state with an exact pure part and a white-noise weight.
typedef struct FpState FpState;

// offset + amplitude·cos(harmonic·θ + phase)
typedef struct FpFit {
  uint32_t harmonic;
  double offset;
  double amplitude;
  double phase;
  double visibility;
  double residual_rms;
} FpFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Post-selected four-photon state over modes c,d,e,f. Free with `fp_state_free`.
FpStatus fp_state_fourphoton(struct FpState **out);

// Two Φ+ pairs on (c,d) and (e,f). Free with `fp_state_free`.
FpStatus fp_state_two_epr(struct FpState **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `state` must come from an `fp_state_*` constructor and not be freed twice.
void fp_state_free(struct FpState *state);

// Sets the weight of the pure part in the white-noise mixture (1 = no noise).
//
// # Safety
// `state` must be a live handle.
FpStatus fp_state_set_noise(struct FpState *state, double weight);

// Writes the 16 normalized amplitudes (index bits c,d,e,f, c most significant; H=0).
//
// # Safety
// `re` and `im` must each point to at least `len` doubles.
FpStatus fp_state_amplitudes(const struct FpState *state, double *re, double *im, size_t len);

// Exact noiseless protocol success probability for a low-bit pattern
// (party A in bit 3), as a reduced fraction.
//
// # Safety
// `state` must be a live handle; `num` and `den` must be writable.
FpStatus fp_success_exact(const struct FpState *state, uint8_t pattern, int64_t *num, int64_t *den);

// Protocol success probability including the handle's noise weight.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
FpStatus fp_success_noisy(const struct FpState *state, uint8_t pattern, double *out);

// Correlation E(φc, φd, φe, φf) of the (noisy) state.
//
// # Safety
// `phases` must point to 4 doubles; `out` must be writable.
FpStatus fp_correlation(const struct FpState *state, const double *phases, double *out);

// Joint ± outcome distribution for analyzer phases on c,d,e,f.
// Index bit 1 in a position means outcome −1 there; c is most significant.
//
// # Safety
// `phases` must point to 4 doubles; `probs` to at least `len` doubles.
FpStatus fp_born_distribution(const struct FpState *state,
                              const double *phases,
                              double *probs,
                              size_t len);

// Least-squares fit of offset + amplitude·cos(harmonic·θ + phase).
// `kind` is an `FpCurveKind`; at least four strictly increasing angles.
//
// # Safety
// `angles` and `values` must point to `n` doubles; `out` must be writable.
FpStatus fp_fit_sinusoid(const double *angles,
                         const double *values,
                         size_t n,
                         uint32_t harmonic,
                         int32_t kind,
                         struct FpFit *out);

// Best deterministic one-bit-broadcast classical success over the 128
// promise-consistent inputs. `scoring` is an `FpScoring`.
//
// # Safety
// `num` and `den` must be writable.
FpStatus fp_classical_bound(int32_t scoring, int64_t *num, int64_t *den);

// Static description of a status code.
const char *fp_status_message(int32_t status);

// Message for the last failing call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *fp_last_error_message(void);

const char *fp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOURPHOTON_H */
