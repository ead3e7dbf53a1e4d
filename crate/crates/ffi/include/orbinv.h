#ifndef ORBINV_H
#define ORBINV_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum OrbinvStatus {
  ORBINV_STATUS_OK = 0,
  /**
   * a required pointer argument was null
   */
  ORBINV_STATUS_NULL_ARGUMENT = 1,
  /**
   * a string argument was not UTF-8
   */
  ORBINV_STATUS_INVALID_UTF8 = 2,
  /**
   * malformed input: parse errors, bad shapes, violated preconditions
   */
  ORBINV_STATUS_INVALID_INPUT = 3,
  /**
   * the working precision could not certify the answer
   */
  ORBINV_STATUS_PRECISION = 4,
  /**
   * an enumeration or iteration budget ran out
   */
  ORBINV_STATUS_BUDGET = 5,
  /**
   * an identity that must hold was violated
   */
  ORBINV_STATUS_VIOLATION = 6,
  /**
   * a panic was caught at the boundary
   */
  ORBINV_STATUS_INTERNAL = 7,
} OrbinvStatus;

/**
 * F_q.
 */
typedef struct OrbinvField OrbinvField;

/**
 * A square matrix over F_q((T)).
 */
typedef struct OrbinvMatrix OrbinvMatrix;

/**
 * A polynomial over F_q((T)).
 */
typedef struct OrbinvPoly OrbinvPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *orbinv_last_error(void);

/**
 * Library version as a static string.
 */
const char *orbinv_version(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void orbinv_string_free(char *s);

/**
 * F_q with the standard (Conway) model.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum OrbinvStatus orbinv_field_new(uint32_t q, struct OrbinvField **out);

/**
 * # Safety
 * `f` must come from `orbinv_field_new` or be null.
 */
void orbinv_field_free(struct OrbinvField *f);

/**
 * Parse a polynomial such as "x^2 - T".
 *
 * # Safety
 * Pointers must be valid; `text` NUL-terminated.
 */
enum OrbinvStatus orbinv_poly_parse(const struct OrbinvField *field,
                                    const char *text_in,
                                    struct OrbinvPoly **out);

/**
 * # Safety
 * `p` must come from this library or be null.
 */
void orbinv_poly_free(struct OrbinvPoly *p);

/**
 * Printed form of a polynomial; parses back to an equal value.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OrbinvStatus orbinv_poly_to_string(const struct OrbinvPoly *p, char **out);

/**
 * Parse a matrix given as JSON rows of series, e.g. [["0","T"],["1","0"]].
 *
 * # Safety
 * Pointers must be valid; `json_rows` NUL-terminated.
 */
enum OrbinvStatus orbinv_matrix_parse_json(const struct OrbinvField *field,
                                           const char *json_rows,
                                           struct OrbinvMatrix **out);

/**
 * Companion matrix of a monic polynomial.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OrbinvStatus orbinv_matrix_companion(const struct OrbinvPoly *p, struct OrbinvMatrix **out);

/**
 * # Safety
 * `m` must come from this library or be null.
 */
void orbinv_matrix_free(struct OrbinvMatrix *m);

/**
 * Matrix entries as JSON rows.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OrbinvStatus orbinv_matrix_to_json(const struct OrbinvMatrix *m, char **out);

/**
 * Characteristic polynomial as a new handle.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OrbinvStatus orbinv_matrix_char_poly(const struct OrbinvMatrix *m, struct OrbinvPoly **out);

/**
 * Classification report as JSON.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OrbinvStatus orbinv_classify_json(const struct OrbinvMatrix *m, int64_t work, char **out);

/**
 * Invariants of the element with characteristic polynomial `chi`:
 * elliptic invariants when χ is irreducible, block invariants when it is
 * squarefree.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OrbinvStatus orbinv_invariants_json(const struct OrbinvPoly *chi, int64_t work, char **out);

/**
 * Mass-formula report for degree n over F_q at precision M; `dmax < 0`
 * selects the default M − 2.
 *
 * # Safety
 * `out` must be valid.
 */
enum OrbinvStatus orbinv_mass_formula_json(uint32_t q,
                                           uint32_t n,
                                           int64_t precision,
                                           int64_t dmax,
                                           uint64_t node_budget,
                                           char **out);

/**
 * Run one command-line invocation given as a JSON array of arguments
 * (without the program name). The report is returned even when the
 * command fails; `exit_code` receives the command-line exit status.
 *
 * # Safety
 * Pointers must be valid; `args_json` NUL-terminated.
 */
enum OrbinvStatus orbinv_command_json(const char *args_json, int32_t *exit_code, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORBINV_H */
