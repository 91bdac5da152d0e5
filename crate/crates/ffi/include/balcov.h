#ifndef BALCOV_H
#define BALCOV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes; the nonzero values match the command-line exit codes.
typedef enum BcStatus {
  BC_STATUS_OK = 0,
  BC_STATUS_NULL_POINTER = 1,
  BC_STATUS_INPUT_ERROR = 2,
  BC_STATUS_RESOURCE_ERROR = 3,
  BC_STATUS_THEOREM_VIOLATION = 4,
  BC_STATUS_PANIC = 5,
} BcStatus;

// A point configuration `(V, r)`.
typedef struct BcConfig BcConfig;

// The minimal balanced subsets of a configuration.
typedef struct BcProfile BcProfile;

// Message for the last failed call on this thread, or NULL.
//
// The pointer stays valid until the next `bc_*` call on this thread.
const char *bc_last_error_message(void);

// Parses a configuration from JSON `{"dim", "points", "r"}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum BcStatus bc_config_from_json(const char *json, struct BcConfig **out);

// # Safety
// `config` must come from [`bc_config_from_json`] and not be used afterwards.
void bc_config_free(struct BcConfig *config);

// Number of points, or 0 for NULL.
//
// # Safety
// `config` must be NULL or a live handle.
size_t bc_config_len(const struct BcConfig *config);

// Enumerates the minimal balanced subsets.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum BcStatus bc_profile_compute(const struct BcConfig *config, struct BcProfile **out);

// # Safety
// `profile` must come from [`bc_profile_compute`] and not be used afterwards.
void bc_profile_free(struct BcProfile *profile);

// Number of minimal balanced subsets, or 0 for NULL.
//
// # Safety
// `profile` must be NULL or a live handle.
size_t bc_profile_count(const struct BcProfile *profile);

// Whether the subset given by 1-based `indices` is balanced.
//
// # Safety
// `indices` must point to `len` readable values (or be NULL with `len == 0`);
// `out` must be writable.
enum BcStatus bc_profile_is_balanced(const struct BcProfile *profile,
                                     const size_t *indices,
                                     size_t len,
                                     bool *out);

// Reduced homology of the non-balanced complex as a JSON array of
// `{"degree", "betti", "torsion"}` records.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum BcStatus bc_homology_json(const struct BcConfig *config, char **out);

// Degree of a cover on a closed oriented triangulation, as the same JSON
// object the `degree` command prints under `result`.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum BcStatus bc_degree_json(const struct BcConfig *config,
                             const char *triangulation_json,
                             const char *cover_json,
                             uint64_t seed,
                             char **out);

// # Safety
// `s` must be NULL or a string returned by this library.
void bc_string_free(char *s);

#endif  /* BALCOV_H */
