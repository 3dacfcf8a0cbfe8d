#ifndef CGC_H
#define CGC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which interpreter's result to read.
 */
typedef enum CgcInterpreter {
  CGC_INTERPRETER_SOURCE = 0,
  CGC_INTERPRETER_ASSEMBLY = 1,
} CgcInterpreter;

/**
 * Result of every fallible call.
 */
typedef enum CgcStatus {
  CGC_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  CGC_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CGC_STATUS_INVALID_UTF8 = 2,
  /**
   * Compilation produced diagnostics; see `cgc_last_error_code`.
   */
  CGC_STATUS_COMPILE_ERROR = 3,
  /**
   * The test-vector document could not be read.
   */
  CGC_STATUS_INPUT_ERROR = 4,
  /**
   * An interpreter failed while executing.
   */
  CGC_STATUS_EXEC_ERROR = 5,
  /**
   * The requested output semantic does not exist.
   */
  CGC_STATUS_NOT_FOUND = 6,
} CgcStatus;

/**
 * Results of running one test vector through both interpreters.
 */
typedef struct CgcExecution CgcExecution;

/**
 * A compiled program.
 */
typedef struct CgcProgram CgcProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Compile `source` for `entry` under `profile`. `limits` is NULL or a
 * comma-separated list of `name=value` overrides. On success `*out`
 * receives a program to release with [`cgc_program_free`].
 *
 * # Safety
 * String arguments are NULL or NUL-terminated; `out` is writable.
 */
enum CgcStatus cgc_compile(const char *source,
                           const char *entry,
                           const char *profile,
                           const char *limits,
                           struct CgcProgram **out);

/**
 * The assembly listing; borrowed from `program`.
 *
 * # Safety
 * `program` is NULL or a live handle from [`cgc_compile`].
 */
const char *cgc_program_listing(const struct CgcProgram *program);

/**
 * Number of executable instructions in the listing (0 for NULL).
 *
 * # Safety
 * `program` is NULL or a live handle from [`cgc_compile`].
 */
size_t cgc_program_instruction_count(const struct CgcProgram *program);

/**
 * # Safety
 * `program` is NULL or a handle from [`cgc_compile`] not yet freed.
 */
void cgc_program_free(struct CgcProgram *program);

/**
 * Run one test-vector document (JSON, as accepted by the command-line
 * `run`) through both interpreters. Texture paths resolve against the
 * current directory. On success `*out` receives an execution to release
 * with [`cgc_execution_free`].
 *
 * # Safety
 * `program` is a live handle; `vectors_json` is NUL-terminated; `out` is
 * writable.
 */
enum CgcStatus cgc_execute(const struct CgcProgram *program,
                           const char *vectors_json,
                           struct CgcExecution **out);

/**
 * 1 when both interpreters agree within `tolerance` per component, 0
 * otherwise (and for NULL).
 *
 * # Safety
 * `exec` is NULL or a live handle from [`cgc_execute`].
 */
int32_t cgc_execution_agrees(const struct CgcExecution *exec, float tolerance);

/**
 * 1 when the chosen interpreter discarded the fragment.
 *
 * # Safety
 * `exec` is NULL or a live handle from [`cgc_execute`].
 */
int32_t cgc_execution_discarded(const struct CgcExecution *exec, enum CgcInterpreter which);

/**
 * Copy the four components of output `semantic` into `out`.
 *
 * # Safety
 * `exec` is a live handle; `semantic` is NUL-terminated; `out` points to
 * four writable floats.
 */
enum CgcStatus cgc_execution_output(const struct CgcExecution *exec,
                                    enum CgcInterpreter which,
                                    const char *semantic,
                                    float *out);

/**
 * # Safety
 * `exec` is NULL or a handle from [`cgc_execute`] not yet freed.
 */
void cgc_execution_free(struct CgcExecution *exec);

/**
 * Message of the last failure on this thread, or NULL.
 */
const char *cgc_last_error_message(void);

/**
 * Diagnostic code (`E_*`) of the last compile failure on this thread;
 * empty for other failures and NULL when nothing has failed.
 */
const char *cgc_last_error_code(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CGC_H */
