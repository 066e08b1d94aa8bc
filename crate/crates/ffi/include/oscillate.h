#ifndef OSCILLATE_H
#define OSCILLATE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OscStatus {
  OSC_STATUS_OK = 0,
  OSC_STATUS_NULL_POINTER,
  OSC_STATUS_INVALID_ARGUMENT,
  OSC_STATUS_LENGTH_EXCEEDED,
  OSC_STATUS_NOT_COPRIME,
  OSC_STATUS_NOT_MODULAR,
  OSC_STATUS_NOT_DIAGONALIZABLE,
  OSC_STATUS_NOT_PARABOLIC,
  OSC_STATUS_NOT_A_CHARACTER,
  OSC_STATUS_NO_CYCLE,
  OSC_STATUS_BISECTION_FAILED,
  OSC_STATUS_NO_POSITIVE_FIXED_POINT,
  OSC_STATUS_CRITICAL_POINT,
  OSC_STATUS_AMBIGUOUS_NESTING,
  OSC_STATUS_NO_CONVERGENCE,
  OSC_STATUS_ACCURACY_BELOW_TAIL,
  OSC_STATUS_OUTSIDE_TRUNCATION,
  OSC_STATUS_NON_MONOTONE,
  OSC_STATUS_NOT_LIPSCHITZ,
  OSC_STATUS_ZERO_PROJECTIVE_POINT,
  OSC_STATUS_PARSE,
  OSC_STATUS_IO,
  OSC_STATUS_BUFFER_TOO_SMALL,
  OSC_STATUS_PANIC,
} OscStatus;

/*
 Opaque Denjoy circle map.
 */
typedef struct OscDenjoy OscDenjoy;

/*
 Opaque weight sequence.
 */
typedef struct OscSequence OscSequence;

typedef struct OscComplex {
  double re;
  double im;
} OscComplex;

/*
 P^{-1} M P = sign * [[1, t], [0, 1]], with P row-major in `p`.
 */
typedef struct OscNormalForm {
  int64_t p[4];
  int64_t t;
  int8_t sign;
} OscNormalForm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length excluding the NUL.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t osc_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *osc_version(void);

/*
 # Safety
 `dst` must be valid for one write.
 */
enum OscStatus osc_sequence_mobius(size_t n, struct OscSequence **dst);

/*
 # Safety
 `dst` must be valid for one write.
 */
enum OscStatus osc_sequence_liouville(size_t n, struct OscSequence **dst);

/*
 c_n = e(n^2 alpha).

 # Safety
 `dst` must be valid for one write.
 */
enum OscStatus osc_sequence_quadratic_phase(double alpha, size_t n, struct OscSequence **dst);

/*
 Rademacher signs times n^(-tau), reproducible from `seed`.

 # Safety
 `dst` must be valid for one write.
 */
enum OscStatus osc_sequence_subnormal(double tau,
                                      size_t n,
                                      uint64_t seed,
                                      struct OscSequence **dst);

/*
 # Safety
 `seq` must come from an `osc_sequence_*` constructor and not be used afterwards.
 */
void osc_sequence_free(struct OscSequence *seq);

/*
 Number of stored terms, 0 for a null handle.

 # Safety
 `seq` must be null or a live handle.
 */
size_t osc_sequence_len(const struct OscSequence *seq);

/*
 # Safety
 `seq` must be a live handle, `dst` valid for one write.
 */
enum OscStatus osc_sequence_growth_bound(const struct OscSequence *seq, double *dst);

/*
 The term c_n, 1-based.

 # Safety
 `seq` must be a live handle, `dst` valid for one write.
 */
enum OscStatus osc_sequence_get(const struct OscSequence *seq, size_t n, struct OscComplex *dst);

/*
 sigma_N(t) = (1/N) sum_{n<=N} c_n e(-n t).

 # Safety
 `seq` must be a live handle, `dst` valid for one write.
 */
enum OscStatus osc_cesaro_mean(const struct OscSequence *seq,
                               double t,
                               size_t n,
                               struct OscComplex *dst);

/*
 S_N = (1/N) sum c_n e(k T^n x) for the rotation T x = x + rho.

 # Safety
 `seq` must be a live handle, `dst` valid for one write.
 */
enum OscStatus osc_birkhoff_rotation(const struct OscSequence *seq,
                                     double rho,
                                     int64_t k,
                                     double x,
                                     size_t n,
                                     struct OscComplex *dst);

/*
 Exact spectrum of e(n^2 p/q). Writes up to `cap` atoms r/s with their
 amplitudes and stores the total count in `len`; returns BufferTooSmall
 (with `len` set) when `cap` is insufficient.

 # Safety
 `r`, `s`, `amp` must be valid for `cap` writes (or null when `cap` is 0);
 `len` valid for one write.
 */
enum OscStatus osc_gauss_spectrum(uint64_t p,
                                  uint64_t q,
                                  uint64_t *r,
                                  uint64_t *s,
                                  struct OscComplex *amp,
                                  size_t cap,
                                  size_t *len);

/*
 Normal form of the parabolic matrix [[a, b], [c, d]].

 # Safety
 `dst` must be valid for one write.
 */
enum OscStatus osc_normal_form(int64_t a,
                               int64_t b,
                               int64_t c,
                               int64_t d,
                               struct OscNormalForm *dst);

/*
 The weighted average of the skew-product counterexample; equal to 1.

 # Safety
 `dst` must be valid for one write.
 */
enum OscStatus osc_counterexample_average(double alpha, uint64_t n, struct OscComplex *dst);

/*
 Period-doubling parameters t_1..t_depth into `ts` (capacity `cap`).

 # Safety
 `ts` must be valid for `cap` writes.
 */
enum OscStatus osc_cascade(size_t depth, double *ts, size_t cap);

/*
 # Safety
 `dst` must be valid for one write.
 */
enum OscStatus osc_denjoy_new(double rho, size_t trunc, struct OscDenjoy **dst);

/*
 # Safety
 `d` must come from `osc_denjoy_new` and not be used afterwards.
 */
void osc_denjoy_free(struct OscDenjoy *d);

/*
 One step of the map on [0, 1).

 # Safety
 `d` must be a live handle, `dst` valid for one write.
 */
enum OscStatus osc_denjoy_step(const struct OscDenjoy *d, double x, double *dst);

/*
 Rotation number estimated from `n` lift iterates of `x0`.

 # Safety
 `d` must be a live handle, `dst` valid for one write.
 */
enum OscStatus osc_denjoy_rotation_number(const struct OscDenjoy *d,
                                          double x0,
                                          size_t n,
                                          double *dst);

/*
 Runs a config file like `oscillate run`; returns the same exit code
 (0 success, 1 experiment error, 2 unreadable or invalid config).

 # Safety
 `config` and `out_dir` must be NUL-terminated UTF-8 strings.
 */
int32_t osc_run_config(const char *config, const char *out_dir, size_t jobs);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OSCILLATE_H */
