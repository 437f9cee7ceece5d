#ifndef RESIDUE_FORGE_H
#define RESIDUE_FORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RF_THEOREM_ONE 1

#define RF_THEOREM_TWO 2

#define RF_THEOREM_INTERIOR 3

#define RF_PSI_GENERIC 0

#define RF_PSI_F 1

#define RF_PSI_VECTOR 2

#define RF_PSI_BIVECTOR 3

#define RF_PSI_TRIVECTOR 4

#define RF_MODE_SYMBOLIC 0

#define RF_MODE_VERIFY 1

#define RF_MODE_BOTH 2

/**
 * Seed used by the command line when none is given.
 */
#define RF_DEFAULT_SEED 20240917

/**
 * Status codes. `RF_ORACLE_FAILURE` still yields a valid report.
 */
typedef enum RfStatus {
  RF_OK = 0,
  RF_ORACLE_FAILURE = 1,
  RF_USAGE = 2,
  RF_NULL_POINTER = 3,
  RF_INVALID_ARGUMENT = 4,
  RF_ENGINE_ERROR = 5,
  RF_PANIC = 6,
} RfStatus;

/**
 * Opaque report handle.
 */
typedef struct RfReport RfReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Runs one pipeline and stores a new report in `*out`.
 *
 * Returns `RF_OK` when every oracle check passes, `RF_ORACLE_FAILURE` when
 * some fail (the report is still stored), and an error code otherwise
 * (`*out` is set to NULL).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
enum RfStatus rf_run(uint32_t theorem,
                     uint32_t psi,
                     uint32_t mode,
                     uint64_t seed,
                     struct RfReport **out);

/**
 * Writes the JSON report to `*out`; free it with [`rf_string_free`].
 *
 * # Safety
 * `report` must come from [`rf_run`] and not be freed; `out` must be writable.
 */
enum RfStatus rf_report_json(const struct RfReport *report, char **out);

/**
 * Writes the LaTeX report to `*out`; free it with [`rf_string_free`].
 *
 * # Safety
 * As for [`rf_report_json`].
 */
enum RfStatus rf_report_latex(const struct RfReport *report, char **out);

/**
 * 1 when every oracle check passed, 0 otherwise or for NULL.
 *
 * # Safety
 * `report` must be NULL or come from [`rf_run`].
 */
int32_t rf_report_all_pass(const struct RfReport *report);

/**
 * Number of oracle rows, or 0 for NULL.
 *
 * # Safety
 * `report` must be NULL or come from [`rf_run`].
 */
size_t rf_report_oracle_count(const struct RfReport *report);

/**
 * Releases a report; NULL is ignored.
 *
 * # Safety
 * `report` must be NULL or come from [`rf_run`], and is invalid afterwards.
 */
void rf_report_free(struct RfReport *report);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or come from this library, and is invalid afterwards.
 */
void rf_string_free(char *s);

/**
 * Message of the last failure on this thread, or NULL. Valid until the next call on this thread.
 */
const char *rf_last_error(void);

/**
 * Library version, static storage.
 */
const char *rf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESIDUE_FORGE_H */
