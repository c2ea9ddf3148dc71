/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef RENGA_H
#define RENGA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every `renga_*` call.
 */
typedef enum RengaStatus {
  RENGA_STATUS_OK = 0,
  RENGA_STATUS_NULL_ARGUMENT = 1,
  RENGA_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON, ruleset or generation config.
   */
  RENGA_STATUS_INVALID_ARGUMENT = 3,
  RENGA_STATUS_IO = 4,
  /**
   * The model directory is stale or corrupt.
   */
  RENGA_STATUS_CACHE = 5,
  RENGA_STATUS_NO_VECTOR_COVERAGE = 6,
  /**
   * A submitted verse broke the form or repetition rules.
   */
  RENGA_STATUS_CONSTRAINT_VIOLATION = 7,
  RENGA_STATUS_SESSION_COMPLETE = 8,
  /**
   * Generation failed for another reason; see the message.
   */
  RENGA_STATUS_FAILED = 9,
  RENGA_STATUS_PANIC = 10,
} RengaStatus;

/**
 * Loaded models. Read-only once loaded, so one handle may serve many threads.
 */
typedef struct RengaEngine RengaEngine;

/**
 * A renga in progress. Not thread-safe.
 */
typedef struct RengaSession RengaSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a
 * success. Valid until the next `renga_*` call on the same thread.
 */
const char *renga_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void renga_string_free(char *s);

/**
 * Loads a model directory written by `renga build-models`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` a valid pointer.
 */
enum RengaStatus renga_engine_load(const char *dir, struct RengaEngine **out);

/**
 * # Safety
 * `engine` must come from [`renga_engine_load`] and not be used afterwards.
 */
void renga_engine_free(struct RengaEngine *engine);

/**
 * Generates a batch of haikus.
 *
 * `request` is a JSON object: `prompts` (list of strings, required),
 * `n` (default 10) and any generation settings (`seed`, `beam_width`,
 * `lambda_ngram`, `lambda_topic`, `dither_temperature`). The result is a
 * JSON array of `{lines, syllables, scores}`.
 *
 * # Safety
 * Pointers must be valid; `engine` from [`renga_engine_load`].
 */
enum RengaStatus renga_generate_json(const struct RengaEngine *engine,
                                     const char *request,
                                     char **out);

/**
 * Starts a session from a ruleset in JSON.
 *
 * # Safety
 * `ruleset` must be a NUL-terminated string; `out` a valid pointer.
 */
enum RengaStatus renga_session_new(const char *ruleset, uint64_t seed, struct RengaSession **out);

/**
 * # Safety
 * `session` must come from [`renga_session_new`] and not be used afterwards.
 */
void renga_session_free(struct RengaSession *session);

/**
 * Lets the machine compose the next link. `out` receives the link as JSON.
 *
 * # Safety
 * Pointers must be valid handles from this library.
 */
enum RengaStatus renga_session_machine_link(struct RengaSession *session,
                                            const struct RengaEngine *engine,
                                            char **out);

/**
 * Submits a human verse, one line per `\n`.
 *
 * On `RENGA_STATUS_CONSTRAINT_VIOLATION` the session is unchanged and
 * `out` holds a JSON array of violations; on success it holds the link.
 *
 * # Safety
 * Pointers must be valid handles from this library.
 */
enum RengaStatus renga_session_submit(struct RengaSession *session,
                                      const struct RengaEngine *engine,
                                      const char *verse,
                                      char **out);

/**
 * Full session state as JSON: ruleset, seed, status and links.
 *
 * # Safety
 * Pointers must be valid; `session` from [`renga_session_new`].
 */
enum RengaStatus renga_session_state_json(const struct RengaSession *session, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RENGA_H */
