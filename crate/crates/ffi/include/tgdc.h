#ifndef TGDC_H
#define TGDC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum TgdcObjective {
  TGDC_OBJECTIVE_REACH = 0,
  TGDC_OBJECTIVE_SAFE = 1,
} TgdcObjective;

/**
 * Result of every fallible call.
 */
typedef enum TgdcStatus {
  TGDC_STATUS_OK = 0,
  /**
   * The game was solved and is not winning.
   */
  TGDC_STATUS_NOT_WINNING = 1,
  TGDC_STATUS_NULL_ARGUMENT = -1,
  TGDC_STATUS_INVALID_UTF8 = -2,
  TGDC_STATUS_PARSE = -3,
  TGDC_STATUS_INVALID_MODEL = -4,
  TGDC_STATUS_UNSUPPORTED = -5,
  TGDC_STATUS_INTERNAL = -6,
} TgdcStatus;

/**
 * Opaque model handle.
 */
typedef struct TgdcModel TgdcModel;

/**
 * Schedule bound; `-1` stands for infinity.
 */
typedef struct TgdcBound {
  int64_t tmin;
  uint64_t smax;
  uint32_t dmax;
  int64_t bound;
} TgdcBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a JSON model file. On success `*out` owns a
 * handle to release with [`tgdc_model_free`]. Validation failures return
 * `INVALID_MODEL` with all diagnostics joined in the error message.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum TgdcStatus tgdc_model_from_json(const char *json, struct TgdcModel **out);

/**
 * # Safety
 * `model` must come from [`tgdc_model_from_json`] and not be freed twice.
 */
void tgdc_model_free(struct TgdcModel *model);

/**
 * Validation diagnostics of a loaded model; always 0, since loading
 * rejects models with diagnostics. `-1` on a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
int64_t tgdc_model_diagnostic_count(const struct TgdcModel *model);

/**
 * 1 for a delayed game, 0 for a classical one, -1 on a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
int tgdc_model_is_delayed(const struct TgdcModel *model);

/**
 * Solves the model. Delayed games go through reduction with cap `cap`,
 * or the model's cap, or the computed bound when `cap` is negative.
 * Returns `OK` when winning and `NOT_WINNING` otherwise; `*winning` is
 * set to 1 or 0 in both cases.
 *
 * # Safety
 * `model` must be a live handle and `winning` writable or null.
 */
enum TgdcStatus tgdc_solve(const struct TgdcModel *model,
                           enum TgdcObjective objective,
                           int64_t cap,
                           int *winning);

/**
 * Schedule-length bound of a delayed game.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum TgdcStatus tgdc_bound(const struct TgdcModel *model, struct TgdcBound *out);

/**
 * Compiles two-counter-machine text into a model file; `*out_json` must
 * be released with [`tgdc_string_free`].
 *
 * # Safety
 * `program` must be a NUL-terminated string and `out_json` writable.
 */
enum TgdcStatus tgdc_compile_2cm(const char *program, char **out_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void tgdc_string_free(char *s);

/**
 * Message of the last failure on this thread, or null.
 */
const char *tgdc_last_error_message(void);

/**
 * Library version, a static string.
 */
const char *tgdc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TGDC_H */
