#ifndef LOCC_H
#define LOCC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LoccParty {
  LOCC_PARTY_ALICE = 0,
  LOCC_PARTY_BOB = 1,
} LoccParty;

typedef enum LoccStatus {
  LOCC_STATUS_OK = 0,
  LOCC_STATUS_NULL_POINTER = 1,
  LOCC_STATUS_INVALID_ARGUMENT = 2,
  LOCC_STATUS_DIMENSION_MISMATCH = 3,
  LOCC_STATUS_IO = 4,
  LOCC_STATUS_PARSE = 5,
  LOCC_STATUS_NUMERIC = 6,
  LOCC_STATUS_BUFFER_TOO_SMALL = 7,
  LOCC_STATUS_PANIC = 8,
} LoccStatus;

typedef enum LoccVerdict {
  LOCC_VERDICT_NO_PROGRESS = 0,
  LOCC_VERDICT_PROGRESS_POSSIBLE = 1,
} LoccVerdict;

// Opaque ensemble handle.
typedef struct LoccEnsemble LoccEnsemble;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread (empty if none). Valid
// until the next failing call on the same thread.
const char *locc_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *locc_version(void);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum LoccStatus locc_ensemble_four(struct LoccEnsemble **out);

// # Safety
// See [`locc_ensemble_four`].
enum LoccStatus locc_ensemble_four_general(double theta, struct LoccEnsemble **out);

// # Safety
// See [`locc_ensemble_four`].
enum LoccStatus locc_ensemble_nine(struct LoccEnsemble **out);

// # Safety
// See [`locc_ensemble_four`].
enum LoccStatus locc_ensemble_nine_general(double eta,
                                           double xi,
                                           double theta,
                                           double gamma,
                                           struct LoccEnsemble **out);

// # Safety
// See [`locc_ensemble_four`].
enum LoccStatus locc_ensemble_computational(size_t d_a, size_t d_b, struct LoccEnsemble **out);

// Loads an ensemble file.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string; `out` as in [`locc_ensemble_four`].
enum LoccStatus locc_ensemble_load(const char *path, struct LoccEnsemble **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `e` must come from a `locc_ensemble_*` constructor and not be used afterwards.
void locc_ensemble_free(struct LoccEnsemble *e);

// Number of states and local dimensions. Any output pointer may be null.
//
// # Safety
// `e` must be a live handle; non-null outputs must be writable.
enum LoccStatus locc_ensemble_shape(const struct LoccEnsemble *e,
                                    size_t *states,
                                    size_t *d_a,
                                    size_t *d_b);

// Best projective first measurement for Alice (qubit ensembles only).
//
// # Safety
// `e` must be a live handle; `value` and `angle` must be writable.
enum LoccStatus locc_optimize_projective(const struct LoccEnsemble *e,
                                         double *value,
                                         double *angle);

// Runs the χ-basis protocol. `per_state` receives one value per state and
// must hold at least `len` doubles; `average` may be null.
//
// # Safety
// `e` must be a live handle; `per_state` must point to `len` writable doubles.
enum LoccStatus locc_simulate_chi(const struct LoccEnsemble *e,
                                  double *per_state,
                                  size_t len,
                                  double *average);

// Zero-error feasibility for `party` measuring first.
//
// # Safety
// `e` must be a live handle; `nullspace_dim` and `verdict` must be writable.
enum LoccStatus locc_feasibility(const struct LoccEnsemble *e,
                                 enum LoccParty party,
                                 size_t *nullspace_dim,
                                 enum LoccVerdict *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCC_H */
