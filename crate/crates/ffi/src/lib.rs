//! C ABI over the catlab library.
//!
//! Objects are opaque handles created by `*_new`/producer functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`CatlabStatus`]; the message of the most recent failure on the calling
//! thread is available from [`catlab_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use catlab::dynamics::PerturbationSpec;
use catlab::mechanism::{build_schedule, run_mechanism, MechanismOptions, MechanismReport, ScheduleMode};
use catlab::qre::drift;
use catlab::{critical_temperature, find_qre, Error, GameParams, QreSet, Stability};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatlabStatus {
    Ok = 0,
    NullPointer = 1,
    /// An argument is outside its domain.
    Domain = 2,
    /// A solver or integrator failed.
    Numerical = 3,
    /// A Rust panic was caught at the boundary.
    Panic = 4,
}

/// Game parameters (cost and network-effect exponent).
pub struct CatlabGame(GameParams);

/// Equilibria at one control level.
pub struct CatlabQreSet(QreSet);

/// Outcome of a catastrophe schedule run.
pub struct CatlabMechanismReport(MechanismReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: Error) -> CatlabStatus {
    set_error(&e.to_string());
    if e.is_validation() {
        CatlabStatus::Domain
    } else {
        CatlabStatus::Numerical
    }
}

fn null(name: &str) -> CatlabStatus {
    set_error(&format!("{name}: null pointer"));
    CatlabStatus::NullPointer
}

/// Runs `f`, converting a panic into `CatlabStatus::Panic`.
fn guard(f: impl FnOnce() -> CatlabStatus) -> CatlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            CatlabStatus::Panic
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn catlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread ("" if none). The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn catlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a game with cost `gamma` in (0, 1) and exponent `alpha` >= 1.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn catlab_game_new(gamma: f64, alpha: f64, out: *mut *mut CatlabGame) -> CatlabStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match GameParams::new(gamma, alpha) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(CatlabGame(p)));
                CatlabStatus::Ok
            }
            Err(e) => {
                *out = ptr::null_mut();
                fail(e)
            }
        }
    })
}

/// # Safety
/// `game` must be null or a handle from `catlab_game_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn catlab_game_free(game: *mut CatlabGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Drift `f(x; T)` of the game.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn catlab_drift(game: *const CatlabGame, x: f64, t: f64, out: *mut f64) -> CatlabStatus {
    guard(|| {
        let (Some(g), false) = (game.as_ref(), out.is_null()) else {
            return null(if game.is_null() { "game" } else { "out" });
        };
        match drift(x, t, &g.0) {
            Ok(v) => {
                *out = v;
                CatlabStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Critical level and fold location of the bilinear game with cost `gamma`.
///
/// # Safety
/// `t_c` and `x_fold` must be writable.
#[no_mangle]
pub unsafe extern "C" fn catlab_critical_temperature(gamma: f64, t_c: *mut f64, x_fold: *mut f64) -> CatlabStatus {
    guard(|| {
        if t_c.is_null() || x_fold.is_null() {
            return null(if t_c.is_null() { "t_c" } else { "x_fold" });
        }
        match critical_temperature(gamma) {
            Ok(c) => {
                *t_c = c.t_c;
                *x_fold = c.x_fold;
                CatlabStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// All equilibria at control level `t`, ascending in `x`.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn catlab_find_qre(game: *const CatlabGame, t: f64, out: *mut *mut CatlabQreSet) -> CatlabStatus {
    guard(|| {
        let (Some(g), false) = (game.as_ref(), out.is_null()) else {
            return null(if game.is_null() { "game" } else { "out" });
        };
        match find_qre(t, &g.0) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(CatlabQreSet(s)));
                CatlabStatus::Ok
            }
            Err(e) => {
                *out = ptr::null_mut();
                fail(e)
            }
        }
    })
}

/// Number of equilibria in `set` (0 for a null handle).
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn catlab_qre_set_len(set: *const CatlabQreSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Equilibrium `index`: its location and whether it is stable (1) or not (0).
///
/// # Safety
/// `set` must be a live handle; `x` and `stable` must be writable.
#[no_mangle]
pub unsafe extern "C" fn catlab_qre_set_get(
    set: *const CatlabQreSet,
    index: usize,
    x: *mut f64,
    stable: *mut i32,
) -> CatlabStatus {
    guard(|| {
        let Some(s) = set.as_ref() else {
            return null("set");
        };
        if x.is_null() || stable.is_null() {
            return null(if x.is_null() { "x" } else { "stable" });
        }
        let Some(q) = s.0.points.get(index) else {
            set_error(&format!("index: {index} out of range (len {})", s.0.len()));
            return CatlabStatus::Domain;
        };
        *x = q.x;
        *stable = i32::from(q.stability == Stability::Stable);
        CatlabStatus::Ok
    })
}

/// # Safety
/// `set` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn catlab_qre_set_free(set: *mut CatlabQreSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Runs the minimal schedule `<0, threshold + margin, 0>` from `x0`.
/// With `eps0 > 0` the drift carries a seeded smooth perturbation of that
/// amplitude and the threshold accounts for it.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn catlab_run_mechanism(
    game: *const CatlabGame,
    x0: f64,
    margin: f64,
    eps0: f64,
    seed: u64,
    out: *mut *mut CatlabMechanismReport,
) -> CatlabStatus {
    guard(|| {
        let (Some(g), false) = (game.as_ref(), out.is_null()) else {
            return null(if game.is_null() { "game" } else { "out" });
        };
        *out = ptr::null_mut();
        let eps = (eps0 > 0.0).then_some(eps0);
        let run = || -> catlab::Result<MechanismReport> {
            let schedule = build_schedule(&g.0, ScheduleMode::Minimal, margin, 3, eps)?;
            let pert = eps.map(|e| PerturbationSpec::smooth_random(e, seed).realize()).transpose()?;
            run_mechanism(x0, &schedule, &g.0, pert.as_ref(), &MechanismOptions::default())
        };
        match run() {
            Ok(r) => {
                *out = Box::into_raw(Box::new(CatlabMechanismReport(r)));
                CatlabStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Final population state and whether the hysteresis outcome was reached.
///
/// # Safety
/// `report` must be a live handle; `final_x` and `hysteresis` must be writable.
#[no_mangle]
pub unsafe extern "C" fn catlab_mechanism_outcome(
    report: *const CatlabMechanismReport,
    final_x: *mut f64,
    hysteresis: *mut i32,
) -> CatlabStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            return null("report");
        };
        if final_x.is_null() || hysteresis.is_null() {
            return null(if final_x.is_null() { "final_x" } else { "hysteresis" });
        }
        *final_x = r.0.final_x;
        *hysteresis = i32::from(r.0.hysteresis_confirmed);
        CatlabStatus::Ok
    })
}

/// States on either side of the fold jump. `has_jump` is 0 when the schedule
/// never dropped the population below 1/2; the other outputs are then NaN.
///
/// # Safety
/// `report` must be a live handle; all outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn catlab_mechanism_jump(
    report: *const CatlabMechanismReport,
    has_jump: *mut i32,
    x_before: *mut f64,
    x_after: *mut f64,
) -> CatlabStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            return null("report");
        };
        if has_jump.is_null() || x_before.is_null() || x_after.is_null() {
            return null("jump output");
        }
        let (h, b, a) = r.0.jump.map_or((0, f64::NAN, f64::NAN), |j| (1, j.x_before, j.x_after));
        *has_jump = h;
        *x_before = b;
        *x_after = a;
        CatlabStatus::Ok
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn catlab_mechanism_report_free(report: *mut CatlabMechanismReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
