#ifndef TOEPLITZ_H
#define TOEPLITZ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ToeplitzStatus {
  TOEPLITZ_STATUS_OK = 0,
  TOEPLITZ_STATUS_NULL_POINTER = 1,
  TOEPLITZ_STATUS_INVALID_UTF8 = 2,
  TOEPLITZ_STATUS_PARSE = 3,
  TOEPLITZ_STATUS_INVALID_ARGUMENT = 4,
  TOEPLITZ_STATUS_BUDGET = 5,
  TOEPLITZ_STATUS_HORIZON = 6,
  TOEPLITZ_STATUS_OVERFLOW = 7,
  TOEPLITZ_STATUS_OUT_OF_RANGE = 8,
  TOEPLITZ_STATUS_BUFFER_TOO_SMALL = 9,
  TOEPLITZ_STATUS_PANIC = 10,
} ToeplitzStatus;

typedef enum ToeplitzVerdict {
  TOEPLITZ_VERDICT_SATISFIED = 0,
  TOEPLITZ_VERDICT_VIOLATED = 1,
  TOEPLITZ_VERDICT_INCONCLUSIVE = 2,
} ToeplitzVerdict;

// Opaque subshift handle.
typedef struct ToeplitzSubshift ToeplitzSubshift;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The last error message on this thread, or null. Valid until the next
// call into this library on the same thread.
const char *toeplitz_last_error(void);

// Builds a subshift from a coding spec such as `"a:2 | x:2 y:2 z:2"`.
//
// # Safety
// `spec` must be a nul-terminated string; `out` must be writable.
enum ToeplitzStatus toeplitz_subshift_new(const char *spec, struct ToeplitzSubshift **out);

// Builds a subshift from a preset name such as `"grigorchuk"`.
//
// # Safety
// `name` must be a nul-terminated string; `out` must be writable.
enum ToeplitzStatus toeplitz_subshift_from_preset(const char *name, struct ToeplitzSubshift **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `h` must come from this library and not be used afterwards.
void toeplitz_subshift_free(struct ToeplitzSubshift *h);

// Number of letters; letter ids used by the coefficient arrays run below it.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_alphabet_size(const struct ToeplitzSubshift *h, size_t *out);

// Writes the first `len` letters as a nul-terminated string. When `cap` is
// too small, `*needed` receives the required capacity.
//
// # Safety
// `buf` must hold `cap` bytes; `needed` must be writable.
enum ToeplitzStatus toeplitz_word_prefix(const struct ToeplitzSubshift *h,
                                         size_t len,
                                         char *buf,
                                         size_t cap,
                                         size_t *needed);

// Number of factors of length `len`, by closed form.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_complexity(const struct ToeplitzSubshift *h,
                                        uint64_t len,
                                        uint64_t *out);

// Number of factors of length `len`, by enumeration.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_complexity_oracle(const struct ToeplitzSubshift *h,
                                               uint64_t len,
                                               uint64_t *out);

// Complexity difference `p(len + 1) - p(len)`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_growth(const struct ToeplitzSubshift *h, uint64_t len, uint64_t *out);

// Palindromic factors of length `len >= 1`, by closed form.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_palindromes(const struct ToeplitzSubshift *h,
                                         uint64_t len,
                                         uint64_t *out);

// Palindromic factors of length `len`, by enumeration.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_palindromes_oracle(const struct ToeplitzSubshift *h,
                                                uint64_t len,
                                                uint64_t *out);

// Repetitivity by closed form; `OUT_OF_RANGE` below its first length.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_repetitivity(const struct ToeplitzSubshift *h,
                                          uint64_t len,
                                          uint64_t *out);

// Repetitivity by containment search.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_repetitivity_oracle(const struct ToeplitzSubshift *h,
                                                 uint64_t len,
                                                 uint64_t *out);

// Boshernitzan verdict from `horizon` product samples.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum ToeplitzStatus toeplitz_bosh_verdict(const struct ToeplitzSubshift *h,
                                          size_t horizon,
                                          enum ToeplitzVerdict *out);

// Eigenvalues (ascending) of the `size`-point section with diagonal `q` and
// off-diagonal `p`, both indexed by letter id.
//
// # Safety
// `p`, `q` must hold `letters` values; `out` must hold `size` values.
enum ToeplitzStatus toeplitz_finite_section_spectrum(const struct ToeplitzSubshift *h,
                                                     const double *p,
                                                     const double *q,
                                                     size_t letters,
                                                     size_t size,
                                                     double *out);

// `(1/n) ln ||M(n)||` for the transfer cocycle at `energy`.
//
// # Safety
// `p`, `q` must hold `letters` values; `out` must be writable.
enum ToeplitzStatus toeplitz_lyapunov(const struct ToeplitzSubshift *h,
                                      const double *p,
                                      const double *q,
                                      size_t letters,
                                      double energy,
                                      size_t n,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOEPLITZ_H */
