#ifndef OPO_SIDEBAND_H
#define OPO_SIDEBAND_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum OpoStatus {
  OPO_STATUS_OK = 0,
  OPO_STATUS_VALIDATION_FAILURE = 1,
  OPO_STATUS_CONFIG_ERROR = 2,
  OPO_STATUS_PHYSICS_BOUNDARY = 3,
  OPO_STATUS_NULL_POINTER = 4,
  OPO_STATUS_BUFFER_TOO_SMALL = 5,
  OPO_STATUS_INTERNAL = 6,
} OpoStatus;

// Opaque model configuration.
typedef struct OpoConfigHandle OpoConfigHandle;

// Opaque solved operating point: covariance, S/A blocks and physicality report.
typedef struct OpoSolution OpoSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the message for the last failure on this thread into `buf`,
// NUL-terminated and truncated to `len` bytes. Returns the full message
// length excluding the terminator.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t opo_last_error(char *buf, size_t len);

// The bundled reference configuration. Release with `opo_config_free`.
struct OpoConfigHandle *opo_config_reference(void);

// Parses a TOML configuration.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum OpoStatus opo_config_from_toml(const char *text, struct OpoConfigHandle **out);

// # Safety
// `cfg` must be null or a handle from this library that was not yet freed.
void opo_config_free(struct OpoConfigHandle *cfg);

// Pump power in units of threshold. The handle is unchanged on error.
//
// # Safety
// `cfg` must be a live handle.
enum OpoStatus opo_config_set_sigma(struct OpoConfigHandle *cfg, double sigma);

// # Safety
// `cfg` must be a live handle.
enum OpoStatus opo_config_set_omega_hz(struct OpoConfigHandle *cfg, double hz);

// # Safety
// `cfg` must be a live handle.
enum OpoStatus opo_config_set_phonons(struct OpoConfigHandle *cfg, bool enabled);

// # Safety
// `cfg` must be a live handle.
enum OpoStatus opo_config_set_detection(struct OpoConfigHandle *cfg, bool enabled);

// Solves the configured operating point. Release with `opo_solution_free`.
//
// # Safety
// `cfg` must be a live handle and `out` a valid pointer.
enum OpoStatus opo_solve(const struct OpoConfigHandle *cfg, struct OpoSolution **out);

// Runs the invariant and oracle suite. Returns `Ok` when every check passes,
// `ValidationFailure` naming the failed checks otherwise, and
// `PhysicsBoundary` when the operating point sits on an oscillation boundary.
//
// # Safety
// `cfg` must be a live handle.
enum OpoStatus opo_validate(const struct OpoConfigHandle *cfg);

// # Safety
// `sol` must be null or a handle from this library that was not yet freed.
void opo_solution_free(struct OpoSolution *sol);

// Side length of the frequency-basis covariance (12), or 0 for a null handle.
//
// # Safety
// `sol` must be null or a live handle.
size_t opo_solution_dim(const struct OpoSolution *sol);

// Row-major copy of the frequency-basis covariance into `out[0..dim*dim]`.
//
// # Safety
// `sol` must be a live handle and `out` must hold `len` doubles.
enum OpoStatus opo_solution_covariance(const struct OpoSolution *sol, double *out, size_t len);

// Row-major 6×6 copies of `V_s`, `V_a` and `C_sa`; each buffer holds 36 doubles.
//
// # Safety
// `sol` must be a live handle and each buffer must hold 36 doubles.
enum OpoStatus opo_solution_sa_blocks(const struct OpoSolution *sol,
                                      double *v_s,
                                      double *v_a,
                                      double *c_sa);

// # Safety
// `sol` must be a live handle and `out` a valid pointer.
enum OpoStatus opo_solution_purity(const struct OpoSolution *sol, double *out);

// Smallest eigenvalue of `V + iΩ`; non-negative for a physical state.
//
// # Safety
// `sol` must be a live handle and `out` a valid pointer.
enum OpoStatus opo_solution_min_eigenvalue(const struct OpoSolution *sol, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPO_SIDEBAND_H */
