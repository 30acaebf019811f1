/* Generated by cbindgen from crates/ffi/src/lib.rs. */

#ifndef ALPHAMAT_H
#define ALPHAMAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AmStatus {
  AM_STATUS_OK = 0,
  AM_STATUS_NULL_POINTER = 1,
  AM_STATUS_INVALID_ARGUMENT = 2,
  AM_STATUS_DOMAIN = 3,
  AM_STATUS_CONFIG = 4,
  AM_STATUS_NUMERICAL = 5,
  AM_STATUS_PARSE = 6,
  AM_STATUS_IO = 7,
  AM_STATUS_PANIC = 8,
} AmStatus;

// Dense matrix with its structure tag.
typedef struct AmMatrix AmMatrix;

// Singular values, descending.
typedef struct AmSpectrum AmSpectrum;

// Finitely supported symbol (Fourier coefficients).
typedef struct AmSymbol AmSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread, or null. Valid until the next failing call.
const char *am_last_error_message(void);

// Library version, static string.
const char *am_version(void);

// Empty symbol with `d` levels.
// `out` must be writable.
enum AmStatus am_symbol_new(size_t d, struct AmSymbol **out);

// Named symbol: `"laplace1d"` (2 - 2cos x) or `"shift1"` (1 + e^{ix}).
// `name` must be a NUL-terminated string; `out` must be writable.
enum AmStatus am_symbol_builtin(const char *name, struct AmSymbol **out);

// Parses the text format: one `j1 .. jd re im` line per coefficient.
// `text` must be a NUL-terminated string; `out` must be writable.
enum AmStatus am_symbol_from_text(const char *text, struct AmSymbol **out);

// Adds `re + i im` to the coefficient at the `d`-index `idx`.
// `sym` must be a live handle; `idx` must point to `d` integers.
enum AmStatus am_symbol_add(struct AmSymbol *sym,
                            const int64_t *idx,
                            size_t d,
                            double re,
                            double im);

// `sym` must be null or a handle not yet freed.
void am_symbol_free(struct AmSymbol *sym);

// `T_{n,α}` with entries `a_{r - α∘c}`.
// `sym` must be a live handle; `n` and `alpha` must point to `d` values; `out` must be writable.
enum AmStatus am_alpha_toeplitz(const struct AmSymbol *sym,
                                const size_t *n,
                                const size_t *alpha,
                                size_t d,
                                struct AmMatrix **out);

// `C_{n,α}` with entries `a_{(r - α∘s) mod n}`. The `n̂` coefficients are given in
// lexicographic order; `coeffs_im` may be null for real data.
// `coeffs_re` (and `coeffs_im` if non-null) must hold `n̂` values; `n`, `alpha` must hold `d`.
enum AmStatus am_alpha_circulant(const double *coeffs_re,
                                 const double *coeffs_im,
                                 const size_t *n,
                                 const size_t *alpha,
                                 size_t d,
                                 struct AmMatrix **out);

// `m` must be a live handle; `rows` and `cols` must be writable.
enum AmStatus am_matrix_shape(const struct AmMatrix *m, size_t *rows, size_t *cols);

// `m` must be a live handle; `re` and `im` must be writable.
enum AmStatus am_matrix_get(const struct AmMatrix *m, size_t r, size_t c, double *re, double *im);

// Singular values by the Jacobi SVD.
// `m` must be a live handle; `out` must be writable.
enum AmStatus am_matrix_singvals(const struct AmMatrix *m, struct AmSpectrum **out);

// `m` must be null or a handle not yet freed.
void am_matrix_free(struct AmMatrix *m);

// Closed-form singular values of `C_{n,α}` (no matrix is formed).
// As for [`am_alpha_circulant`].
enum AmStatus am_alpha_circulant_singvals(const double *coeffs_re,
                                          const double *coeffs_im,
                                          const size_t *n,
                                          const size_t *alpha,
                                          size_t d,
                                          struct AmSpectrum **out);

// `s` must be a live handle; `len` must be writable.
enum AmStatus am_spectrum_len(const struct AmSpectrum *s, size_t *len);

// Copies the values (descending) into `buf`, which must hold at least the spectrum length.
// `s` must be a live handle; `buf` must have room for `cap` doubles.
enum AmStatus am_spectrum_values(const struct AmSpectrum *s, double *buf, size_t cap);

// Number of structural zeros at the end of the spectrum.
// `s` must be a live handle; `count` must be writable.
enum AmStatus am_spectrum_structural_zeros(const struct AmSpectrum *s, size_t *count);

// `s` must be null or a handle not yet freed.
void am_spectrum_free(struct AmSpectrum *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALPHAMAT_H */
