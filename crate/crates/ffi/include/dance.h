#ifndef DANCE_H
#define DANCE_H

/* Generated by cbindgen from the dance-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DanceStatus {
  DANCE_STATUS_OK = 0,
  DANCE_STATUS_NULL_POINTER = 1,
  DANCE_STATUS_INVALID_ARGUMENT = 2,
  DANCE_STATUS_INVALID_UTF8 = 3,
  DANCE_STATUS_PARSE = 4,
  DANCE_STATUS_VALIDATION = 5,
  DANCE_STATUS_DOMAIN = 6,
  DANCE_STATUS_IO = 7,
  DANCE_STATUS_PANIC = 8,
} DanceStatus;

typedef enum DanceStrategy {
  DANCE_STRATEGY_TIGHTENING = 0,
  DANCE_STRATEGY_CONSERVATIVE = 1,
  DANCE_STRATEGY_NONE = 2,
} DanceStrategy;

/**
 * Opaque scenario handle.
 */
typedef struct DanceScenario DanceScenario;

/**
 * Opaque handle to a completed trial.
 */
typedef struct DanceTrial DanceTrial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dance_last_error(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void dance_string_free(char *s);

/**
 * Distance to brake from `v` to rest at `decel_mag`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DanceStatus dance_stopping_distance(double v, double decel_mag, double *out);

/**
 * Tightened upper acceleration bound at speed `v` and free gap `gap`
 * (pass `INFINITY` for an open road).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DanceStatus dance_tightened_upper_bound(double v,
                                             double gap,
                                             double beta,
                                             double epsilon,
                                             double a_max,
                                             double a_brake_peak,
                                             double *out);

/**
 * The vehicle-and-cyclist scenario under `strategy`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DanceStatus dance_scenario_paper(enum DanceStrategy strategy, struct DanceScenario **out);

/**
 * Two unmitigated vehicles head-on in a corridor.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DanceStatus dance_scenario_corridor(struct DanceScenario **out);

/**
 * Parse and validate a JSON scenario document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be valid for writes.
 */
enum DanceStatus dance_scenario_from_json(const char *json, struct DanceScenario **out);

/**
 * Serialize a scenario to JSON. Free the result with `dance_string_free`.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for writes.
 */
enum DanceStatus dance_scenario_to_json(const struct DanceScenario *scenario, char **out);

/**
 * Switch every moving agent to `strategy`.
 *
 * # Safety
 * `scenario` must be a live handle.
 */
enum DanceStatus dance_scenario_set_strategy(struct DanceScenario *scenario,
                                             enum DanceStrategy strategy);

/**
 * Release a scenario. Null is ignored.
 *
 * # Safety
 * `scenario` must come from this library and not have been freed.
 */
void dance_scenario_free(struct DanceScenario *scenario);

/**
 * Run a scenario to completion or first collision.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid for writes.
 */
enum DanceStatus dance_trial_run(const struct DanceScenario *scenario, struct DanceTrial **out);

/**
 * Number of ticks executed.
 *
 * # Safety
 * `trial` must be a live handle; `out` must be valid for writes.
 */
enum DanceStatus dance_trial_tick_count(const struct DanceTrial *trial, size_t *out);

/**
 * Whether the trial ended in a collision.
 *
 * # Safety
 * `trial` must be a live handle; `out` must be valid for writes.
 */
enum DanceStatus dance_trial_collided(const struct DanceTrial *trial, bool *out);

/**
 * Per-tick CSV telemetry. Free the result with `dance_string_free`.
 *
 * # Safety
 * `trial` must be a live handle; `out` must be valid for writes.
 */
enum DanceStatus dance_trial_csv(const struct DanceTrial *trial, char **out);

/**
 * Write the CSV telemetry to `path`.
 *
 * # Safety
 * `trial` must be a live handle; `path` must be a nul-terminated string.
 */
enum DanceStatus dance_trial_write_csv(const struct DanceTrial *trial, const char *path);

/**
 * JSON summary of the primary agent. Free the result with
 * `dance_string_free`.
 *
 * # Safety
 * `trial` must be a live handle; `out` must be valid for writes.
 */
enum DanceStatus dance_trial_summary_json(const struct DanceTrial *trial, char **out);

/**
 * Release a trial. Null is ignored.
 *
 * # Safety
 * `trial` must come from this library and not have been freed.
 */
void dance_trial_free(struct DanceTrial *trial);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DANCE_H */
