#ifndef GL2LAB_H
#define GL2LAB_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  GL2_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  GL2_STATUS_NULL_POINTER = 1,
  /**
   * Malformed text (matrix encoding, family or check name, UTF-8).
   */
  GL2_STATUS_PARSE = 2,
  /**
   * Out-of-range or inconsistent argument (modulus, prime, exponent, ...).
   */
  GL2_STATUS_INVALID_ARGUMENT = 3,
  /**
   * A singular matrix where a unit is required.
   */
  GL2_STATUS_NOT_INVERTIBLE = 4,
  /**
   * The request exceeds the configured size budget.
   */
  GL2_STATUS_BUDGET_EXCEEDED = 5,
  /**
   * Operands live over different moduli.
   */
  GL2_STATUS_MODULUS_MISMATCH = 6,
  /**
   * Filesystem or serialization failure.
   */
  GL2_STATUS_IO = 7,
  /**
   * A panic was caught at the boundary.
   */
  GL2_STATUS_INTERNAL = 8,
} Gl2Status;

/**
 * Opaque matrix handle.
 */
typedef struct Gl2Mat2 Gl2Mat2;

/**
 * Opaque subgroup handle.
 */
typedef struct Gl2Subgroup Gl2Subgroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next gl2lab call on the same thread.
 */
const char *gl2lab_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gl2lab_string_free(char *s);

/**
 * Parses "a,b,c,d" modulo `n`.
 *
 * # Safety
 * `text` is a NUL-terminated string; `out` is writable.
 */
Gl2Status gl2lab_mat2_parse(uint64_t n, const char *text, Gl2Mat2 **out);

/**
 * # Safety
 * `m` comes from this library and is not used afterwards. Null is ignored.
 */
void gl2lab_mat2_free(Gl2Mat2 *m);

/**
 * Product `a * b` as a new handle.
 *
 * # Safety
 * `a`, `b` are live handles; `out` is writable.
 */
Gl2Status gl2lab_mat2_mul(const Gl2Mat2 *a, const Gl2Mat2 *b, Gl2Mat2 **out);

/**
 * Determinant and trace as residues.
 *
 * # Safety
 * `m` is a live handle; `det` and `trace` are writable.
 */
Gl2Status gl2lab_mat2_det_trace(const Gl2Mat2 *m, uint64_t *det, uint64_t *trace);

/**
 * Multiplicative order; fails with `NotInvertible` on singular matrices.
 *
 * # Safety
 * `m` is a live handle; `out` is writable.
 */
Gl2Status gl2lab_mat2_order(const Gl2Mat2 *m, uint64_t *out);

/**
 * Canonical "a,b,c,d" encoding.
 *
 * # Safety
 * `m` is a live handle; `out` is writable.
 */
Gl2Status gl2lab_mat2_to_string(const Gl2Mat2 *m, char **out);

/**
 * Subgroup generated by `count` matrices modulo `n` (`count` may be 0).
 *
 * # Safety
 * `gens` points to `count` live handles (or is null when `count` is 0).
 */
Gl2Status gl2lab_subgroup_generate(uint64_t n,
                                   const Gl2Mat2 *const *gens,
                                   size_t count,
                                   Gl2Subgroup **out);

/**
 * A standard subgroup of GL2(p) by name: Cs, Ns, Cns, Nns, B0, D, Z,
 * GammaZ, SL2 or GL2 (case-insensitive).
 *
 * # Safety
 * `family` is a NUL-terminated string; `out` is writable.
 */
Gl2Status gl2lab_subgroup_named(const char *family, uint64_t p, Gl2Subgroup **out);

/**
 * # Safety
 * `g` comes from this library and is not used afterwards. Null is ignored.
 */
void gl2lab_subgroup_free(Gl2Subgroup *g);

/**
 * Number of elements.
 *
 * # Safety
 * `g` is a live handle; `out` is writable.
 */
Gl2Status gl2lab_subgroup_order(const Gl2Subgroup *g, uint64_t *out);

/**
 * Whether `m` is an element of `g`.
 *
 * # Safety
 * `g`, `m` are live handles; `out` is writable.
 */
Gl2Status gl2lab_subgroup_contains(const Gl2Subgroup *g, const Gl2Mat2 *m, bool *out);

/**
 * Whether some conjugate `m h m^-1` lies in `g` (prime modulus). When found
 * and `witness` is non-null, `*witness` receives `m` as a new handle;
 * otherwise it is set to null.
 *
 * # Safety
 * `g`, `h` are live handles; `found` is writable; `witness` is null or writable.
 */
Gl2Status gl2lab_conjugate_contains(const Gl2Subgroup *g,
                                    const Gl2Subgroup *h,
                                    bool *found,
                                    Gl2Mat2 **witness);

/**
 * Shape classification of `g` (prime modulus) as JSON.
 *
 * # Safety
 * `g` is a live handle; `out` is writable.
 */
Gl2Status gl2lab_classify_json(const Gl2Subgroup *g, char **out);

/**
 * Runs a scan with default budgets. `mode` is "cyclotomic" or "abelian";
 * `cache_dir` may be null. `failed` receives whether an asserted scan found
 * a violation.
 *
 * # Safety
 * `mode` is a NUL-terminated string; `cache_dir` is null or one; `out` and
 * `failed` are writable.
 */
Gl2Status gl2lab_scan_json(const char *mode,
                           uint64_t p,
                           uint64_t degree,
                           bool ramified,
                           const char *cache_dir,
                           char **out,
                           bool *failed);

/**
 * Runs one verification with default budgets and returns its JSON report.
 * `check` is one of "containment" (needs `part` "a".."d"), "index2-split",
 * "index2-nonsplit", "abelian-shapes", "trivial-sl2" (uses `p` as the modulus and seed 0)
 * or "dickson". `part` may be null otherwise.
 *
 * # Safety
 * `check` is a NUL-terminated string; `part` is null or one; `out` and
 * `passed` are writable.
 */
Gl2Status gl2lab_verify_json(const char *check,
                             uint64_t p,
                             const char *part,
                             char **out,
                             bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GL2LAB_H */
