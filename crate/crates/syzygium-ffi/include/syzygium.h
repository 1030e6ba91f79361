#ifndef SYZYGIUM_H
#define SYZYGIUM_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SYZYGIUM_OK 0

#define SYZYGIUM_ERR -1

#define SYZYGIUM_ERR_NULL -2

#define SYZYGIUM_ERR_UTF8 -3

#define SYZYGIUM_ERR_PANIC -4

/**
 * Opaque syzygy-bundle handle.
 */
typedef struct SyzBundle SyzBundle;

/**
 * Opaque plane-curve handle.
 */
typedef struct SyzCurve SyzCurve;

/**
 * Opaque coefficient-field handle.
 */
typedef struct SyzField SyzField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Thread-local message for the most recent failure; NULL when the last
 * call succeeded. The pointer stays valid until the next API call on the
 * same thread; do not free it.
 */
const char *syzygium_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `syzygium_*` call that
 * documents caller ownership, and must not have been freed already.
 */
void syzygium_string_free(char *s);

/**
 * Parse a field descriptor such as `GF(2)`, `GF(3)(t)` or
 * `GF(4)=GF(2)[a]/(a^2+a+1)`. Returns NULL on failure.
 *
 * # Safety
 * `descriptor` must be a valid NUL-terminated string.
 */
struct SyzField *syzygium_field_parse(const char *descriptor);

/**
 * Canonical descriptor text of a field handle (caller frees).
 *
 * # Safety
 * `field` must be a live handle from `syzygium_field_parse`.
 */
char *syzygium_field_descriptor(const struct SyzField *field);

/**
 * # Safety
 * `field` must be a live handle; it is invalid after this call.
 */
void syzygium_field_free(struct SyzField *field);

/**
 * Build a plane curve from a field descriptor, an equation and a cover
 * pair such as `"x"`, `"z"`. Returns NULL on failure.
 *
 * # Safety
 * All pointers must be valid NUL-terminated strings.
 */
struct SyzCurve *syzygium_curve_new(const char *field,
                                    const char *equation,
                                    const char *cover_u,
                                    const char *cover_v);

/**
 * # Safety
 * `curve` must be a live handle; it is invalid after this call.
 */
void syzygium_curve_free(struct SyzCurve *curve);

/**
 * Genus `(d-1)(d-2)/2` of the curve; negative on error.
 *
 * # Safety
 * `curve` must be a live handle.
 */
int64_t syzygium_curve_genus(const struct SyzCurve *curve);

/**
 * Saturation smoothness check. Returns 1 (smooth, `*exponent_out` set),
 * 0 (inconclusive) or a negative error code. `n_max = 0` uses the default
 * bound.
 *
 * # Safety
 * `curve` must be a live handle; `exponent_out` may be NULL.
 */
int32_t syzygium_curve_smooth(const struct SyzCurve *curve, uint32_t n_max, uint32_t *exponent_out);

/**
 * Build `Syz(generators)(twist)`; `generators` is a semicolon-separated
 * list of polynomial texts. Returns NULL on failure (for instance when the
 * generators share a zero on the curve).
 *
 * # Safety
 * `curve` must be a live handle, `generators` a valid string.
 */
struct SyzBundle *syzygium_bundle_new(const struct SyzCurve *curve,
                                      const char *generators,
                                      int64_t twist);

/**
 * # Safety
 * `bundle` must be a live handle; it is invalid after this call.
 */
void syzygium_bundle_free(struct SyzBundle *bundle);

/**
 * New handle for the e-th Frobenius pullback.
 *
 * # Safety
 * `bundle` must be a live handle.
 */
struct SyzBundle *syzygium_bundle_pullback(const struct SyzBundle *bundle, uint32_t e);

/**
 * Dimension of the space of syzygies of the given total degree; negative
 * on error.
 *
 * # Safety
 * `bundle` must be a live handle.
 */
int64_t syzygium_bundle_sections_dim(const struct SyzBundle *bundle, uint32_t degree);

/**
 * Check a semicolon-separated candidate tuple: 1 verified, 0 not a syzygy,
 * negative on error.
 *
 * # Safety
 * `bundle` must be a live handle, `candidate` a valid string.
 */
int32_t syzygium_bundle_verify_syzygy(const struct SyzBundle *bundle, const char *candidate);

/**
 * Search a trivializing frame of the e-th pullback; returns the JSON
 * certificate (caller frees) or NULL when no frame is found or on error
 * (distinguish via `syzygium_last_error`).
 *
 * # Safety
 * `bundle` must be a live handle.
 */
char *syzygium_bundle_trivialize(const struct SyzBundle *bundle, uint32_t e);

/**
 * Hasse-Witt matrix of the curve as a JSON object (caller frees).
 *
 * # Safety
 * `curve` must be a live handle.
 */
char *syzygium_hasse_witt_json(const struct SyzCurve *curve);

/**
 * Run a scenario by name with integer parameters passed as a JSON object,
 * e.g. `{"n": 2, "l": 0}`. Returns the report JSON (caller frees).
 *
 * # Safety
 * Both pointers must be valid NUL-terminated strings.
 */
char *syzygium_scenario_run_json(const char *name, const char *params_json);

/**
 * Re-verify a certificate JSON: 1 accepted, 0 rejected, negative on error.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string.
 */
int32_t syzygium_check_certificate(const char *json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SYZYGIUM_H */
