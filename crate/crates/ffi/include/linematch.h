#ifndef LINEMATCH_H
#define LINEMATCH_H

/* Generated by cbindgen from linematch-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every entry point.
typedef enum LmStatus {
  LM_STATUS_OK = 0,
  LM_STATUS_NULL_POINTER = 1,
  LM_STATUS_INVALID_UTF8 = 2,
  LM_STATUS_PARSE_ERROR = 3,
  LM_STATUS_VALIDATION_ERROR = 4,
  LM_STATUS_RUN_ERROR = 5,
  LM_STATUS_BAD_ARGUMENT = 6,
  // The requested check ran but found violations.
  LM_STATUS_CHECK_FAILED = 7,
} LmStatus;

// Opaque validated instance handle.
typedef struct LmInstance LmInstance;

// Opaque run transcript handle.
typedef struct LmTranscript LmTranscript;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *lm_version(void);

// Parses `{"servers": [...], "requests": [...]}` JSON into an instance
// handle. With `strict` set, unit minimum gaps, on-server requests and one
// request per server are enforced.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum LmStatus lm_instance_parse(const char *json, bool strict, struct LmInstance **out);

// Generates an instance: kind 0 = uniform, 1 = clustered,
// 2 = geometric gaps, 3 = harmonic adversary.
//
// # Safety
// `out` must be a valid pointer.
enum LmStatus lm_instance_generate(uint32_t kind, size_t n, uint64_t seed, struct LmInstance **out);

// Serializes the instance back to JSON. Free the string with
// [`lm_string_free`].
//
// # Safety
// `instance` must be a live handle and `out` a valid pointer.
enum LmStatus lm_instance_json(const struct LmInstance *instance, char **out);

// Number of servers in the instance.
//
// # Safety
// `instance` must be a live handle and `out` a valid pointer.
enum LmStatus lm_instance_server_count(const struct LmInstance *instance, size_t *out);

// Releases an instance handle. Null is ignored.
//
// # Safety
// `instance` must be null or a handle produced by this library, not yet freed.
void lm_instance_free(struct LmInstance *instance);

// Runs an algorithm (0 = greedy, 1 = harmonic, 2 = doubled harmonic,
// 3 = modified doubled harmonic) over the instance with the given seed and
// pseudo-distance mode (0 = clamped, 1 = raw). Identical inputs produce
// identical transcripts.
//
// # Safety
// `instance` must be a live handle and `out` a valid pointer.
enum LmStatus lm_run(const struct LmInstance *instance,
                     uint32_t algorithm,
                     uint64_t seed,
                     uint32_t pd_mode,
                     struct LmTranscript **out);

// Total online cost of the run.
//
// # Safety
// `transcript` must be a live handle and `out` a valid pointer.
enum LmStatus lm_transcript_total_cost(const struct LmTranscript *transcript, double *out);

// Offline optimal cost of the full request sequence.
//
// # Safety
// `transcript` must be a live handle and `out` a valid pointer.
enum LmStatus lm_transcript_opt_cost(const struct LmTranscript *transcript, double *out);

// Online-to-optimal cost ratio (1 when the optimum is zero).
//
// # Safety
// `transcript` must be a live handle and `out` a valid pointer.
enum LmStatus lm_transcript_ratio(const struct LmTranscript *transcript, double *out);

// Full transcript as JSON (steps, phase ledger, totals). Free the string
// with [`lm_string_free`].
//
// # Safety
// `transcript` must be a live handle and `out` a valid pointer.
enum LmStatus lm_transcript_json(const struct LmTranscript *transcript, char **out);

// Releases a transcript handle. Null is ignored.
//
// # Safety
// `transcript` must be null or a handle produced by this library, not yet freed.
void lm_transcript_free(struct LmTranscript *transcript);

// Reproduces the four-server non-monotonicity analysis and writes it as
// JSON. Returns `CheckFailed` (still writing the JSON) if the expected
// probabilities were not reproduced.
//
// # Safety
// `out` must be a valid pointer.
enum LmStatus lm_counterexample_json(char **out);

// Runs the verification battery (level 0 = quick, 1 = full; full takes on
// the order of a minute) and writes the reports as a JSON array. Returns
// `CheckFailed` (still writing the JSON) when any check has violations.
//
// # Safety
// `out` must be a valid pointer; `out_violations` may be null.
enum LmStatus lm_verify_json(uint32_t level, uint64_t seed, uint64_t *out_violations, char **out);

// Parses an algorithm name ("greedy", "harmonic", "dh", "mdh") to the code
// accepted by [`lm_run`]; returns `BadArgument` for unknown names.
//
// # Safety
// `name` must be a valid NUL-terminated string and `out` a valid pointer.
enum LmStatus lm_algorithm_code(const char *name, uint32_t *out);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `text` must be null or a string produced by this library, not yet freed.
void lm_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINEMATCH_H */
