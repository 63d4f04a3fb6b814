#ifndef KINETREE_H
#define KINETREE_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from the kinetree-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible entry points.
 */
typedef enum KtStatus {
  KT_STATUS_OK = 0,
  /**
   * Bad arguments: NULL pointers, non-UTF-8 strings.
   */
  KT_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Manifest or configuration rejected.
   */
  KT_STATUS_INVALID_INPUT = 2,
  /**
   * A pipeline stage failed.
   */
  KT_STATUS_STAGE_FAILURE = 3,
} KtStatus;

/**
 * Opaque result of one pipeline run.
 */
typedef struct KtPipelineResult KtPipelineResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a malloc'd string; free with `kt_string_free`.
 */
char *kt_version(void);

/**
 * Free a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `s` must have been returned by a `kt_*` function and not freed before.
 */
void kt_string_free(char *s);

/**
 * Message for the most recent failure on this thread; free with
 * `kt_string_free`. NULL when no failure has been recorded.
 */
char *kt_last_error(void);

/**
 * Run the full pipeline on a manifest file.
 *
 * `config_json` may be NULL or empty for defaults; otherwise it must be the
 * JSON configuration document. On success writes artifacts under `out_dir`
 * and stores a result handle in `*result`; the caller frees it with
 * `kt_result_free`.
 *
 * # Safety
 * `manifest_path` and `out_dir` must be valid NUL-terminated strings;
 * `result` must point to writable storage for one pointer.
 */
enum KtStatus kt_run_pipeline(const char *manifest_path,
                              const char *config_json,
                              const char *out_dir,
                              struct KtPipelineResult **result);

/**
 * Free a pipeline result handle. NULL is a no-op.
 *
 * # Safety
 * `result` must come from `kt_run_pipeline` and not be freed twice.
 */
void kt_result_free(struct KtPipelineResult *result);

/**
 * Borrowed pointer to the written URDF path; valid until the result is
 * freed. Do NOT pass to `kt_string_free`.
 *
 * # Safety
 * `result` must be a live handle from `kt_run_pipeline`.
 */
const char *kt_result_urdf_path(const struct KtPipelineResult *result);

/**
 * Borrowed pointer to the tree dump JSON; valid until the result is freed.
 *
 * # Safety
 * `result` must be a live handle from `kt_run_pipeline`.
 */
const char *kt_result_tree_json(const struct KtPipelineResult *result);

/**
 * Borrowed pointer to the metrics JSON, or NULL when the manifest carried
 * no ground truth; valid until the result is freed.
 *
 * # Safety
 * `result` must be a live handle from `kt_run_pipeline`.
 */
const char *kt_result_metrics_json(const struct KtPipelineResult *result);

/**
 * Number of edges in the inferred tree.
 *
 * # Safety
 * `result` must be a live handle from `kt_run_pipeline`.
 */
uintptr_t kt_result_edge_count(const struct KtPipelineResult *result);

/**
 * Root part id of the inferred tree.
 *
 * # Safety
 * `result` must be a live handle from `kt_run_pipeline`.
 */
uintptr_t kt_result_root(const struct KtPipelineResult *result);

/**
 * Generate a synthetic ground-truth fixture (template by name: chain,
 * star, multi-branch, symmetric-legs, door, drawer) under `out_dir` and
 * return the manifest path as a malloc'd string (free with
 * `kt_string_free`), or NULL on failure.
 *
 * # Safety
 * `template` and `out_dir` must be valid NUL-terminated strings.
 */
char *kt_generate_fixture(const char *template_, uint64_t seed, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KINETREE_H */
