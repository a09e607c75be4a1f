#ifndef SPREGO_H
#define SPREGO_H

/* Generated by cbindgen from the sprego-ffi sources; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum SpregoStatus {
  SPREGO_STATUS_OK = 0,
  SPREGO_STATUS_NULL_ARGUMENT = 1,
  SPREGO_STATUS_INVALID_UTF8 = 2,
  SPREGO_STATUS_PARSE_ERROR = 3,
  SPREGO_STATUS_CSV_ERROR = 4,
  SPREGO_STATUS_REWRITE_REFUSED = 5,
  SPREGO_STATUS_ROW_OUT_OF_RANGE = 6,
  SPREGO_STATUS_PANIC = 7,
} SpregoStatus;

/**
 * A parsed formula.
 */
typedef struct SpregoFormula SpregoFormula;

/**
 * A loaded table.
 */
typedef struct SpregoTable SpregoTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library on this thread.
 */
const char *sprego_last_error(void);

/**
 * Library version as a static string.
 */
const char *sprego_version(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void sprego_string_free(char *s);

/**
 * Loads a table from CSV text with a header row.
 *
 * # Safety
 * `csv` and `name` must be NUL-terminated strings; `out` must be writable.
 */
enum SpregoStatus sprego_table_from_csv(const char *csv,
                                        const char *name,
                                        struct SpregoTable **out);

/**
 * Number of data rows, or 0 for null.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t sprego_table_rows(const struct SpregoTable *table);

/**
 * # Safety
 * `table` must be null or a handle not yet freed.
 */
void sprego_table_free(struct SpregoTable *table);

/**
 * Parses a formula.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum SpregoStatus sprego_formula_parse(const char *source, struct SpregoFormula **out);

/**
 * # Safety
 * `formula` must be null or a handle not yet freed.
 */
void sprego_formula_free(struct SpregoFormula *formula);

/**
 * Canonical text of a formula.
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum SpregoStatus sprego_formula_format(const struct SpregoFormula *formula, char **out);

/**
 * Evaluates a formula and writes the result as JSON: a value, or an
 * array of rows for a block. `row` 0 selects array mode,
 * otherwise scalar mode at that 1-based data row.
 *
 * # Safety
 * Handles must be live; `out_json` must be writable.
 */
enum SpregoStatus sprego_evaluate_json(const struct SpregoFormula *formula,
                                       const struct SpregoTable *table,
                                       uint32_t row,
                                       uint64_t seed,
                                       char **out_json);

/**
 * Lint diagnostics as a JSON array. `table` may be null; when given, its
 * headers let lookups over the named table be rewritten.
 *
 * # Safety
 * `formula` must be live, `table` null or live; `out_json` writable.
 */
enum SpregoStatus sprego_lint_json(const struct SpregoFormula *formula,
                                   const struct SpregoTable *table,
                                   char **out_json);

/**
 * Rewrites problem-specific calls into a new formula handle. Refusals
 * return `SPREGO_STATUS_REWRITE_REFUSED` with the reason as the last
 * error.
 *
 * # Safety
 * `formula` must be live, `table` null or live; `out` writable.
 */
enum SpregoStatus sprego_rewrite(const struct SpregoFormula *formula,
                                 const struct SpregoTable *table,
                                 struct SpregoFormula **out);

/**
 * Competency profile as JSON.
 *
 * # Safety
 * `formula` must be live; `out_json` writable.
 */
enum SpregoStatus sprego_classify_json(const struct SpregoFormula *formula, char **out_json);

/**
 * Runs every shipped rule case and writes the report as JSON.
 * `*passed` is set to 1 when every case passed, else 0.
 *
 * # Safety
 * `out_json` and `passed` must be writable.
 */
enum SpregoStatus sprego_check_all_rules_json(uint64_t seed,
                                              size_t trials,
                                              int32_t *passed,
                                              char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPREGO_H */
