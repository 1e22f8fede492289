#ifndef CATLAB_H
#define CATLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum CatlabStatus {
  CATLAB_STATUS_OK = 0,
  CATLAB_STATUS_NULL_POINTER = 1,
  // An argument is outside its domain.
  CATLAB_STATUS_DOMAIN = 2,
  // A solver or integrator failed.
  CATLAB_STATUS_NUMERICAL = 3,
  // A Rust panic was caught at the boundary.
  CATLAB_STATUS_PANIC = 4,
} CatlabStatus;

// Game parameters (cost and network-effect exponent).
typedef struct CatlabGame CatlabGame;

// Outcome of a catastrophe schedule run.
typedef struct CatlabMechanismReport CatlabMechanismReport;

// Equilibria at one control level.
typedef struct CatlabQreSet CatlabQreSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *catlab_version(void);

// Message of the last failed call on this thread ("" if none). The pointer
// stays valid until the next failing call on the same thread.
const char *catlab_last_error(void);

// Creates a game with cost `gamma` in (0, 1) and exponent `alpha` >= 1.
//
// # Safety
// `out` must be null or point to writable storage for one pointer.
enum CatlabStatus catlab_game_new(double gamma, double alpha, struct CatlabGame **out);

// # Safety
// `game` must be null or a handle from `catlab_game_new` not yet freed.
void catlab_game_free(struct CatlabGame *game);

// Drift `f(x; T)` of the game.
//
// # Safety
// `game` must be a live handle; `out` must be writable.
enum CatlabStatus catlab_drift(const struct CatlabGame *game, double x, double t, double *out);

// Critical level and fold location of the bilinear game with cost `gamma`.
//
// # Safety
// `t_c` and `x_fold` must be writable.
enum CatlabStatus catlab_critical_temperature(double gamma, double *t_c, double *x_fold);

// All equilibria at control level `t`, ascending in `x`.
//
// # Safety
// `game` must be a live handle; `out` must be writable.
enum CatlabStatus catlab_find_qre(const struct CatlabGame *game,
                                  double t,
                                  struct CatlabQreSet **out);

// Number of equilibria in `set` (0 for a null handle).
//
// # Safety
// `set` must be null or a live handle.
uintptr_t catlab_qre_set_len(const struct CatlabQreSet *set);

// Equilibrium `index`: its location and whether it is stable (1) or not (0).
//
// # Safety
// `set` must be a live handle; `x` and `stable` must be writable.
enum CatlabStatus catlab_qre_set_get(const struct CatlabQreSet *set,
                                     uintptr_t index,
                                     double *x,
                                     int32_t *stable);

// # Safety
// `set` must be null or a handle not yet freed.
void catlab_qre_set_free(struct CatlabQreSet *set);

// Runs the minimal schedule `<0, threshold + margin, 0>` from `x0`.
// With `eps0 > 0` the drift carries a seeded smooth perturbation of that
// amplitude and the threshold accounts for it.
//
// # Safety
// `game` must be a live handle; `out` must be writable.
enum CatlabStatus catlab_run_mechanism(const struct CatlabGame *game,
                                       double x0,
                                       double margin,
                                       double eps0,
                                       uint64_t seed,
                                       struct CatlabMechanismReport **out);

// Final population state and whether the hysteresis outcome was reached.
//
// # Safety
// `report` must be a live handle; `final_x` and `hysteresis` must be writable.
enum CatlabStatus catlab_mechanism_outcome(const struct CatlabMechanismReport *report,
                                           double *final_x,
                                           int32_t *hysteresis);

// States on either side of the fold jump. `has_jump` is 0 when the schedule
// never dropped the population below 1/2; the other outputs are then NaN.
//
// # Safety
// `report` must be a live handle; all outputs must be writable.
enum CatlabStatus catlab_mechanism_jump(const struct CatlabMechanismReport *report,
                                        int32_t *has_jump,
                                        double *x_before,
                                        double *x_after);

// # Safety
// `report` must be null or a handle not yet freed.
void catlab_mechanism_report_free(struct CatlabMechanismReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATLAB_H */
