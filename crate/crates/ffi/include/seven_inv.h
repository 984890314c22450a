#ifndef SEVEN_INV_H
#define SEVEN_INV_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SevenInvStatus {
  SEVEN_INV_STATUS_OK = 0,
  SEVEN_INV_STATUS_NULL_ARGUMENT = 1,
  SEVEN_INV_STATUS_INVALID_PAIR = 2,
  SEVEN_INV_STATUS_INFINITE_H4 = 3,
  SEVEN_INV_STATUS_INVALID_ARGUMENT = 4,
  SEVEN_INV_STATUS_INTERNAL = 5,
  SEVEN_INV_STATUS_PANIC = 6,
} SevenInvStatus;

/**
 * A validated parameter pair.
 */
typedef struct SevenInvPair SevenInvPair;

/**
 * A computed invariant report.
 */
typedef struct SevenInvReport SevenInvReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * call into this library from the same thread.
 */
const char *seven_inv_last_error(void);

/**
 * Library version as a static string.
 */
const char *seven_inv_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void seven_inv_string_free(char *s);

/**
 * Validates (a, b); `a` and `b` point to three integers each.
 *
 * # Safety
 * `a`, `b` must point to 3 readable `int64_t`; `out` must be writable.
 */
enum SevenInvStatus seven_inv_pair_new(const int64_t *a,
                                       const int64_t *b,
                                       struct SevenInvPair **out);

/**
 * # Safety
 * `pair` must be NULL or a handle from [`seven_inv_pair_new`], freed once.
 */
void seven_inv_pair_free(struct SevenInvPair *pair);

/**
 * # Safety
 * `pair` must be a live handle; `out` must be writable.
 */
enum SevenInvStatus seven_inv_report_new(const struct SevenInvPair *pair,
                                         struct SevenInvReport **out);

/**
 * # Safety
 * `report` must be NULL or a handle from [`seven_inv_report_new`], freed once.
 */
void seven_inv_report_free(struct SevenInvReport *report);

/**
 * The report as a JSON object.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum SevenInvStatus seven_inv_report_json(const struct SevenInvReport *report, char **out);

/**
 * One field as text: "n", "m", "s", "mu", "lk", "p1", "defect_minus",
 * "defect_plus". Rationals print as "p/q" or "p".
 *
 * # Safety
 * `report` must be a live handle, `field` a NUL-terminated string, `out` writable.
 */
enum SevenInvStatus seven_inv_report_field(const struct SevenInvReport *report,
                                           const char *field,
                                           char **out);

/**
 * Exact D(q; p1, p2, p3) as "p/q" text.
 *
 * # Safety
 * `p` must point to 3 readable `int64_t`; `out` must be writable.
 */
enum SevenInvStatus seven_inv_defect_exact(int64_t q, const int64_t *p, char **out);

/**
 * D(q; p1, p2, p3) in double precision.
 *
 * # Safety
 * `p` must point to 3 readable `int64_t`; `out` must be writable.
 */
enum SevenInvStatus seven_inv_defect_float(int64_t q, const int64_t *p, double *out);

/**
 * Runs the strata oracle; `equal` receives 1 when it matches the closed form.
 * `json` may be NULL; otherwise it receives the full report.
 *
 * # Safety
 * `pair` must be a live handle; `equal` writable; `json` NULL or writable.
 */
enum SevenInvStatus seven_inv_oracle_check(const struct SevenInvPair *pair,
                                           int32_t *equal,
                                           char **json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SEVEN_INV_H */
