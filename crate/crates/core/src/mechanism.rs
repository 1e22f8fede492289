//! The catastrophe schedule: raise the control level past the fold, let the
//! population fall to the lower branch, then switch the control off.
//!
//! Because the lower state sits in the basin of `x = 0` at `T = 0`, the
//! population settles at the efficient equilibrium and stays there
//! (hysteresis).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::check_eps0;
use crate::dynamics::{
    converge_until, ConvergenceBudget, IntegratorOptions, Perturbation, Terminal,
};
use crate::error::{Error, Result};
use crate::game::{mixed_equilibrium, GameParams};
use crate::qre::{critical_temperature, find_qre, turning_points, upper_fold};

/// Default distance of the peak level above the threshold.
pub const DEFAULT_MARGIN: f64 = 0.05;
/// Offset above `T_c` at which the post-fold state is read.
pub const FOLD_EPS: f64 = 1e-6;
/// A final state below this counts as the efficient equilibrium.
pub const ZERO_TOL: f64 = 1e-6;
/// Boundary starts of a `T > 0` phase are moved this far inside `(0, 1)`.
const BOUNDARY_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    /// `<0, peak, 0>`.
    #[default]
    Minimal,
    /// Evenly spaced levels up to the peak and back down.
    Ramp,
}

impl ScheduleMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleMode::Minimal => "minimal",
            ScheduleMode::Ramp => "ramp",
        }
    }
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScheduleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimal" => Ok(ScheduleMode::Minimal),
            "ramp" => Ok(ScheduleMode::Ramp),
            other => Err(Error::domain("mode", format!("unknown schedule mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSchedule {
    /// `T_0 = 0, ..., T_n = 0`.
    pub levels: Vec<f64>,
    /// Level the peak must exceed for the fold to be crossed.
    pub threshold: f64,
    #[serde(skip)]
    pub budget: ConvergenceBudget,
}

impl PhaseSchedule {
    /// Checks the endpoint and sign rules and attaches the default budget.
    pub fn new(levels: Vec<f64>, threshold: f64) -> Result<Self> {
        if levels.len() < 2 || levels[0] != 0.0 || *levels.last().unwrap() != 0.0 {
            return Err(Error::domain("levels", "schedule must start and end at T = 0"));
        }
        if levels.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::domain("levels", "levels must be finite and >= 0"));
        }
        Ok(PhaseSchedule {
            levels,
            threshold,
            budget: ConvergenceBudget::default(),
        })
    }

    pub fn peak(&self) -> f64 {
        self.levels.iter().copied().fold(0.0, f64::max)
    }
}

/// Level the schedule must exceed.
///
/// * bilinear: `T_c(gamma)`, or `T_c(gamma - eps0)` under perturbation;
/// * `alpha >= 3`: `1/2`, where the equilibrium is unique and below `1/2`;
/// * other `alpha > 1`: the numerically located upper fold;
/// * `alpha = 1`: `0`, as there is no lock-in equilibrium to escape.
pub fn threshold(p: &GameParams, eps0: Option<f64>) -> Result<f64> {
    let gamma = match eps0 {
        Some(e) => {
            check_eps0(e, p.gamma)?;
            p.gamma - e
        }
        None => p.gamma,
    };
    if p.is_bilinear() {
        return Ok(critical_temperature(gamma)?.t_c);
    }
    if p.alpha >= 3.0 {
        return Ok(0.5);
    }
    Ok(upper_fold(&p.with_gamma(gamma))?.map_or(0.0, |c| c.t_c))
}

/// Builds a schedule peaking at `threshold + margin`.
pub fn build_schedule(
    p: &GameParams,
    mode: ScheduleMode,
    margin: f64,
    steps: usize,
    eps0: Option<f64>,
) -> Result<PhaseSchedule> {
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::domain("margin", "must be positive and finite"));
    }
    let threshold = threshold(p, eps0)?;
    let peak = threshold + margin;
    let levels = match mode {
        ScheduleMode::Minimal => vec![0.0, peak, 0.0],
        ScheduleMode::Ramp => {
            if steps < 3 {
                return Err(Error::domain("steps", "ramp needs at least 3 levels"));
            }
            let up = steps.div_ceil(2);
            let down = steps - up;
            let mut levels: Vec<f64> = (0..up).map(|i| peak * i as f64 / (up - 1) as f64).collect();
            levels.extend((1..=down).map(|j| peak * (1.0 - j as f64 / down as f64)));
            levels
        }
    };
    PhaseSchedule::new(levels, threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MechanismOptions {
    pub integrator: IntegratorOptions,
    /// End a `T > 0` phase as soon as `x < x_l(T)`, below every separatrix.
    /// Off by default so every phase ends on a certified equilibrium.
    pub stop_past_separatrix: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phase {
    pub temperature: f64,
    pub start_x: f64,
    pub terminal_x: f64,
    pub converged: bool,
    pub terminal: Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump {
    pub phase: usize,
    pub temperature: f64,
    pub x_before: f64,
    pub x_after: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalMass {
    pub gamma: f64,
    pub alpha: f64,
    pub t_c: f64,
    /// Upper-branch state at the fold.
    pub x_before: f64,
    /// Equilibrium the population falls to just past the fold.
    pub x_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismReport {
    pub x0: f64,
    pub levels: Vec<f64>,
    pub threshold: f64,
    pub phases: Vec<Phase>,
    pub jump: Option<Jump>,
    pub critical_mass: Option<CriticalMass>,
    pub hysteresis_confirmed: bool,
    pub final_x: f64,
    pub notes: Vec<String>,
}

/// Drives the dynamics through every level of `schedule`, each phase starting
/// from the previous terminal state.
pub fn run_mechanism(
    x0: f64,
    schedule: &PhaseSchedule,
    p: &GameParams,
    pert: Option<&Perturbation>,
    opts: &MechanismOptions,
) -> Result<MechanismReport> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::domain("x0", format!("{x0} outside [0, 1]")));
    }
    let mut notes = Vec::new();
    let lock_in = mixed_equilibrium(p);
    let locked = match lock_in {
        Some(m) if x0 >= m => true,
        Some(_) => {
            notes.push("already in basin: x0 is below the mixed equilibrium".to_string());
            false
        }
        None => {
            notes.push("no interior mixed equilibrium: nothing to escape".to_string());
            false
        }
    };
    if schedule.peak() <= schedule.threshold {
        notes.push(format!(
            "no fold crossed: peak {} does not exceed threshold {}",
            schedule.peak(),
            schedule.threshold
        ));
    }

    let mut x = x0;
    let mut phases = Vec::with_capacity(schedule.levels.len());
    let mut jump = None;
    for (i, &t) in schedule.levels.iter().enumerate() {
        let start = if t > 0.0 {
            x.clamp(BOUNDARY_NUDGE, 1.0 - BOUNDARY_NUDGE)
        } else {
            x
        };
        let x_l = turning_points(t).filter(|_| opts.stop_past_separatrix && t > 0.0);
        let stop = |x: f64| x_l.is_some_and(|tp| x < tp.x_l);
        let run = converge_until(start, t, p, pert, &opts.integrator, &schedule.budget, &stop)
            .map_err(|e| e.at_temperature(t))?;
        if !run.converged && run.trajectory.terminal != Terminal::Escaped {
            notes.push(format!("phase {i} (T = {t}) did not converge"));
        }
        if jump.is_none() && start > 0.5 && run.terminal_x < 0.5 {
            jump = Some(Jump {
                phase: i,
                temperature: t,
                x_before: start,
                x_after: run.terminal_x,
            });
        }
        phases.push(Phase {
            temperature: t,
            start_x: start,
            terminal_x: run.terminal_x,
            converged: run.converged,
            terminal: run.trajectory.terminal,
        });
        x = run.terminal_x;
    }

    let critical_mass = match critical_mass_report(p.gamma, p.alpha) {
        Ok(c) => Some(c),
        Err(e) => {
            notes.push(format!("critical mass unavailable: {e}"));
            None
        }
    };
    let final_x = x;
    let hysteresis_confirmed = locked && final_x < ZERO_TOL;
    Ok(MechanismReport {
        x0,
        levels: schedule.levels.clone(),
        threshold: schedule.threshold,
        phases,
        jump,
        critical_mass,
        hysteresis_confirmed,
        final_x,
        notes,
    })
}

/// Fold location and the states on either side of the jump.
///
/// `x_after` is the largest equilibrium below the fold at `T_c + 1e-6`,
/// which is where a population leaving the vanished upper branch settles.
pub fn critical_mass_report(gamma: f64, alpha: f64) -> Result<CriticalMass> {
    let p = GameParams::new(gamma, alpha)?;
    let fold = if p.is_bilinear() {
        critical_temperature(gamma)?
    } else {
        upper_fold(&p)?.ok_or_else(|| {
            Error::UndefinedRegime(format!("no upper fold for alpha = {alpha}"))
        })?
    };
    let after = find_qre(fold.t_c + FOLD_EPS, &p)?;
    let x_after = after
        .points
        .iter()
        .map(|q| q.x)
        .filter(|x| *x < fold.x_fold)
        .fold(f64::NAN, f64::max);
    if x_after.is_nan() {
        return Err(Error::UndefinedRegime("no equilibrium below the fold".into()));
    }
    Ok(CriticalMass {
        gamma,
        alpha,
        t_c: fold.t_c,
        x_before: fold.x_fold,
        x_after,
    })
}

/// Critical masses over a grid of costs, in parallel and in grid order.
pub fn critical_mass_scan(gammas: &[f64], alpha: f64) -> Result<Vec<CriticalMass>> {
    gammas
        .par_iter()
        .map(|&g| critical_mass_report(g, alpha))
        .collect()
}

/// The scanned cost whose jump endpoints are closest (max-norm) to the target.
pub fn closest_jump(
    gammas: &[f64],
    alpha: f64,
    target_before: f64,
    target_after: f64,
) -> Result<Option<(CriticalMass, f64)>> {
    let scan = critical_mass_scan(gammas, alpha)?;
    Ok(scan
        .into_iter()
        .map(|c| {
            let d = (c.x_before - target_before)
                .abs()
                .max((c.x_after - target_after).abs());
            (c, d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::PerturbationSpec;

    fn g(gamma: f64) -> GameParams {
        GameParams::bilinear(gamma).unwrap()
    }

    #[test]
    fn minimal_schedule_examples() {
        let s = build_schedule(&g(0.185), ScheduleMode::Minimal, 0.05, 3, None).unwrap();
        assert_eq!(s.levels.len(), 3);
        assert!((s.levels[1] - 0.35).abs() < 0.01);

        let p4 = GameParams::new(0.2, 4.0).unwrap();
        let s = build_schedule(&p4, ScheduleMode::Minimal, 0.01, 3, None).unwrap();
        assert_eq!(s.levels, vec![0.0, 0.51, 0.0]);

        let s = build_schedule(&g(0.3), ScheduleMode::Minimal, 0.02, 3, Some(0.05)).unwrap();
        let expect = critical_temperature(0.25).unwrap().t_c + 0.02;
        assert_eq!(s.levels[1], expect);
    }

    #[test]
    fn ramp_is_unimodal() {
        for steps in 3..12 {
            let s = build_schedule(&g(0.3), ScheduleMode::Ramp, 0.05, steps, None).unwrap();
            assert_eq!(s.levels.len(), steps);
            assert_eq!(s.levels[0], 0.0);
            assert_eq!(*s.levels.last().unwrap(), 0.0);
            let top = s.levels.iter().position(|t| *t == s.peak()).unwrap();
            assert!(s.levels[..=top].windows(2).all(|w| w[0] < w[1]));
            assert!(s.levels[top..].windows(2).all(|w| w[0] > w[1]));
            assert!((s.peak() - s.threshold - 0.05).abs() < 1e-15);
        }
    }

    #[test]
    fn schedule_rejections() {
        let p = g(0.3);
        assert!(build_schedule(&p, ScheduleMode::Minimal, 0.0, 3, None).is_err());
        assert!(build_schedule(&p, ScheduleMode::Ramp, 0.05, 2, None).is_err());
        assert!(build_schedule(&p, ScheduleMode::Minimal, 0.05, 3, Some(0.3)).is_err());
        assert!(PhaseSchedule::new(vec![0.0, 0.4], 0.3).is_err());
        assert!("steep".parse::<ScheduleMode>().is_err());
    }

    #[test]
    fn lock_in_escapes_through_the_fold() {
        let p = g(0.185);
        let s = build_schedule(&p, ScheduleMode::Minimal, DEFAULT_MARGIN, 3, None).unwrap();
        let r = run_mechanism(0.999, &s, &p, None, &MechanismOptions::default()).unwrap();
        assert!(r.final_x < ZERO_TOL);
        assert!(r.hysteresis_confirmed);
        let j = r.jump.unwrap();
        assert!(j.x_before > 0.5925 && j.x_after < 0.5);
        assert!(r.phases.iter().all(|ph| ph.converged));
        assert!((r.phases[0].terminal_x - 1.0).abs() < 1e-6);
        assert!(r.notes.is_empty(), "{:?}", r.notes);
    }

    #[test]
    fn below_the_separatrix_is_flagged() {
        let p = g(0.185);
        let s = build_schedule(&p, ScheduleMode::Minimal, DEFAULT_MARGIN, 3, None).unwrap();
        let r = run_mechanism(0.4, &s, &p, None, &MechanismOptions::default()).unwrap();
        assert!(r.final_x < ZERO_TOL);
        assert!(!r.hysteresis_confirmed);
        assert!(r.notes.iter().any(|n| n.contains("already in basin")));
    }

    #[test]
    fn subcritical_peak_keeps_lock_in() {
        let p = g(0.185);
        let tc = critical_temperature(0.185).unwrap().t_c;
        let s = PhaseSchedule::new(vec![0.0, tc - 0.01, 0.0], tc).unwrap();
        let r = run_mechanism(0.999, &s, &p, None, &MechanismOptions::default()).unwrap();
        assert!((r.final_x - 1.0).abs() < 1e-6);
        assert!(r.jump.is_none());
        assert!(r.notes.iter().any(|n| n.contains("no fold crossed")));
    }

    #[test]
    fn early_exit_reaches_same_outcome() {
        let p = g(0.185);
        let s = build_schedule(&p, ScheduleMode::Minimal, DEFAULT_MARGIN, 3, None).unwrap();
        let opts = MechanismOptions {
            stop_past_separatrix: true,
            ..MechanismOptions::default()
        };
        let r = run_mechanism(0.999, &s, &p, None, &opts).unwrap();
        assert_eq!(r.phases[1].terminal, Terminal::Escaped);
        assert!(r.final_x < ZERO_TOL);
    }

    #[test]
    fn perturbed_schedule_escapes() {
        let p = g(0.3);
        let s = build_schedule(&p, ScheduleMode::Minimal, DEFAULT_MARGIN, 3, Some(0.05)).unwrap();
        let e = PerturbationSpec::smooth_random(0.05, 11).realize().unwrap();
        let r = run_mechanism(0.999, &s, &p, Some(&e), &MechanismOptions::default()).unwrap();
        assert!(r.final_x < ZERO_TOL);
        assert!(r.hysteresis_confirmed);
    }

    #[test]
    fn steep_network_effect_escapes_with_half_threshold() {
        let p = GameParams::new(0.2, 4.0).unwrap();
        let s = build_schedule(&p, ScheduleMode::Minimal, 0.01, 3, None).unwrap();
        let r = run_mechanism(0.999, &s, &p, None, &MechanismOptions::default()).unwrap();
        assert!(r.final_x < ZERO_TOL);
    }

    #[test]
    fn critical_mass_bilinear() {
        let c = critical_mass_report(0.185, 2.0).unwrap();
        assert!((c.x_before - 0.816).abs() < 1e-3);
        assert!(c.x_before > (1.0 + 0.185) / 2.0);
        assert!(c.x_after < 0.5);
        let tiny = critical_mass_report(1e-6, 2.0).unwrap();
        assert!(tiny.x_before > 0.5 && tiny.x_before < 0.51);
    }

    #[test]
    fn critical_mass_general_alpha_matches_bilinear_limit() {
        let a = critical_mass_report(0.3, 2.0).unwrap();
        let b = critical_mass_report(0.3, 2.0 + 1e-9).unwrap();
        assert!((a.t_c - b.t_c).abs() < 1e-6);
        assert!((a.x_before - b.x_before).abs() < 1e-3);
    }

    #[test]
    fn jump_scan_finds_a_close_cost() {
        let gammas: Vec<f64> = (1..100).map(|i| i as f64 * 0.005).collect();
        let (_, d) = closest_jump(&gammas, 2.0, 0.69, 0.15).unwrap().unwrap();
        assert!(d < 0.01);
    }
}
