//! Time-domain engines for the Q-learning dynamics.
//!
//! The continuous field is `x' = x(1-x) (f(x; T, gamma) + eps(x))` in rescaled
//! time. It is integrated with classical fixed-step RK4; a run is converged
//! once `|x'|` has stayed below the tolerance for a window of steps.

mod perturbation;
mod qlearning;

pub use perturbation::{sample_perturbation, Perturbation, PerturbationKind, PerturbationSpec};
pub use qlearning::{discrete_q_learning, QLearningConfig};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::qre::{drift_unchecked, find_qre, min_root_interval};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub step: f64,
    pub conv_tol: f64,
    /// Consecutive calm steps required to declare convergence.
    pub conv_window: usize,
    pub h_min: f64,
    /// Record one sample every this many steps (the stride doubles when
    /// `max_samples` is reached).
    pub record_every: usize,
    pub max_samples: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            step: 1e-3,
            conv_tol: 1e-10,
            conv_window: 100,
            h_min: 1e-9,
            record_every: 100,
            max_samples: 50_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    Converged,
    MaxTime,
    /// Stopped by a caller-supplied exit region.
    Escaped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminal: Terminal,
    pub terminal_x: f64,
}

impl Trajectory {
    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

/// The right-hand side `x(1-x) (f + eps)`.
#[derive(Clone, Copy)]
struct Field<'a> {
    t: f64,
    p: &'a GameParams,
    pert: Option<&'a Perturbation>,
}

impl Field<'_> {
    #[inline]
    fn eval(&self, x: f64) -> f64 {
        let w = x * (1.0 - x);
        if w == 0.0 {
            return 0.0;
        }
        let eps = self.pert.map_or(0.0, |e| e.sample(x));
        w * (drift_unchecked(x, self.t, self.p) + eps)
    }

    fn admissible(&self, x: f64) -> bool {
        if self.t > 0.0 {
            x > 0.0 && x < 1.0
        } else {
            (0.0..=1.0).contains(&x)
        }
    }

    fn check(&self, x: f64) -> Result<()> {
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::domain("T", "must be finite and >= 0"));
        }
        if !self.admissible(x) {
            let range = if self.t > 0.0 { "(0, 1) when T > 0" } else { "[0, 1]" };
            return Err(Error::domain("x0", format!("{x} outside {range}")));
        }
        Ok(())
    }
}

/// `x'` at `x`. Boundary states are allowed only at `T = 0`.
pub fn vector_field(x: f64, t: f64, p: &GameParams, pert: Option<&Perturbation>) -> Result<f64> {
    let field = Field { t, p, pert };
    field.check(x)?;
    Ok(field.eval(x))
}

/// Resumable RK4 stepper.
struct Integrator<'a> {
    field: Field<'a>,
    opts: IntegratorOptions,
    t: f64,
    x: f64,
    calm: usize,
    steps: usize,
    stride: usize,
    samples: Vec<Sample>,
}

impl<'a> Integrator<'a> {
    fn new(x0: f64, field: Field<'a>, opts: IntegratorOptions) -> Result<Self> {
        field.check(x0)?;
        if !(opts.step > 0.0 && opts.h_min > 0.0 && opts.h_min <= opts.step) {
            return Err(Error::domain("step", "need 0 < h_min <= step"));
        }
        Ok(Integrator {
            field,
            opts,
            t: 0.0,
            x: x0,
            calm: 0,
            steps: 0,
            stride: opts.record_every.max(1),
            samples: vec![Sample { t: 0.0, x: x0 }],
        })
    }

    fn rk4(&self, x: f64, h: f64) -> f64 {
        let f = |x| self.field.eval(x);
        let k1 = f(x);
        let k2 = f(x + 0.5 * h * k1);
        let k3 = f(x + 0.5 * h * k2);
        let k4 = f(x + h * k3);
        x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }

    fn record(&mut self) {
        if self.samples.len() >= self.opts.max_samples {
            let mut keep = false;
            self.samples.retain(|_| {
                keep = !keep;
                keep
            });
            self.stride *= 2;
        }
        if self.samples.last().is_some_and(|s| s.t < self.t) {
            self.samples.push(Sample { t: self.t, x: self.x });
        }
    }

    fn advance_to(&mut self, t_end: f64, stop: &dyn Fn(f64) -> bool) -> Result<Terminal> {
        while self.t < t_end {
            let mut h = self.opts.step.min(t_end - self.t);
            let x_new = loop {
                let x_new = self.rk4(self.x, h);
                if x_new.is_finite() && self.field.admissible(x_new) {
                    break x_new;
                }
                h *= 0.5;
                if h < self.opts.h_min {
                    return Err(Error::StepUnderflow {
                        t: self.t,
                        x: self.x,
                        h_min: self.opts.h_min,
                    });
                }
            };
            self.x = x_new;
            self.t += h;
            self.steps += 1;
            if self.field.eval(self.x).abs() < self.opts.conv_tol {
                self.calm += 1;
            } else {
                self.calm = 0;
            }
            if self.steps.is_multiple_of(self.stride) {
                self.record();
            }
            if self.calm >= self.opts.conv_window {
                self.record();
                return Ok(Terminal::Converged);
            }
            if stop(self.x) {
                self.record();
                return Ok(Terminal::Escaped);
            }
        }
        self.record();
        Ok(Terminal::MaxTime)
    }

    fn trajectory(&self, terminal: Terminal) -> Trajectory {
        Trajectory {
            samples: self.samples.clone(),
            terminal,
            terminal_x: self.x,
        }
    }
}

/// Integrates from `x0` up to `t_max`, stopping early on convergence.
pub fn integrate(
    x0: f64,
    t: f64,
    p: &GameParams,
    t_max: f64,
    pert: Option<&Perturbation>,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    integrate_until(x0, t, p, t_max, pert, opts, &|_| false)
}

/// Like [`integrate`], but also stops (as `Escaped`) once `stop(x)` holds.
pub fn integrate_until(
    x0: f64,
    t: f64,
    p: &GameParams,
    t_max: f64,
    pert: Option<&Perturbation>,
    opts: &IntegratorOptions,
    stop: &dyn Fn(f64) -> bool,
) -> Result<Trajectory> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::domain("t_max", "must be positive and finite"));
    }
    let mut run = Integrator::new(x0, Field { t, p, pert }, *opts)?;
    let terminal = run.advance_to(t_max, stop)?;
    Ok(run.trajectory(terminal))
}

/// Budget for [`converge_to_qre`]: the horizon doubles from `t_start` up to `t_limit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceBudget {
    pub t_start: f64,
    pub t_limit: f64,
}

impl Default for ConvergenceBudget {
    fn default() -> Self {
        ConvergenceBudget {
            t_start: 1e2,
            t_limit: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    /// `|x'|` at exit.
    pub speed: f64,
    /// Index into `find_qre(T)` of the matched equilibrium and its distance
    /// (unperturbed runs only).
    pub matched: Option<(usize, f64)>,
    /// Terminal state lies in the perturbation envelope's zero band
    /// `f(x; gamma + eps0) <= 0 <= f(x; gamma - eps0)` (perturbed runs only).
    pub in_envelope: Option<bool>,
    /// Interval guaranteed to hold the smallest perturbed equilibrium
    /// (perturbed runs with an admissible amplitude only).
    pub root_interval: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergence {
    pub terminal_x: f64,
    pub converged: bool,
    pub certificate: Certificate,
    pub trajectory: Trajectory,
}

/// Distance within which a terminal state is matched to a QRE.
pub const MATCH_TOL: f64 = 1e-6;
const ENVELOPE_SLACK: f64 = 1e-8;

/// Runs the dynamics with an escalating horizon until convergence and
/// certifies the terminal state. Exhausting the budget is reported through
/// `converged = false`, never silently.
pub fn converge_to_qre(
    x0: f64,
    t: f64,
    p: &GameParams,
    pert: Option<&Perturbation>,
    opts: &IntegratorOptions,
    budget: &ConvergenceBudget,
) -> Result<Convergence> {
    converge_until(x0, t, p, pert, opts, budget, &|_| false)
}

pub(crate) fn converge_until(
    x0: f64,
    t: f64,
    p: &GameParams,
    pert: Option<&Perturbation>,
    opts: &IntegratorOptions,
    budget: &ConvergenceBudget,
    stop: &dyn Fn(f64) -> bool,
) -> Result<Convergence> {
    if !(budget.t_start > 0.0 && budget.t_limit >= budget.t_start) {
        return Err(Error::domain("budget", "need 0 < t_start <= t_limit"));
    }
    let field = Field { t, p, pert };
    let mut run = Integrator::new(x0, field, *opts)?;
    let mut horizon = budget.t_start;
    let terminal = loop {
        let terminal = run.advance_to(horizon, stop)?;
        if terminal != Terminal::MaxTime || horizon >= budget.t_limit {
            break terminal;
        }
        horizon = (2.0 * horizon).min(budget.t_limit);
    };
    let x = run.x;
    let speed = field.eval(x).abs();
    let certificate = match pert {
        None => {
            let set = find_qre(t, p)?;
            let matched = set
                .nearest(x)
                .map(|i| (i, (set.points[i].x - x).abs()))
                .filter(|(_, d)| *d <= MATCH_TOL);
            Certificate {
                speed,
                matched,
                in_envelope: None,
                root_interval: None,
            }
        }
        Some(e) => {
            let eps0 = e.eps0();
            let on_boundary = t == 0.0 && (x < MATCH_TOL || 1.0 - x < MATCH_TOL);
            let in_band = on_boundary || {
                let low = drift_unchecked(x, t, &p.with_gamma(p.gamma + eps0));
                let high = drift_unchecked(x, t, &p.with_gamma(p.gamma - eps0));
                low <= ENVELOPE_SLACK && -ENVELOPE_SLACK <= high
            };
            Certificate {
                speed,
                matched: None,
                in_envelope: Some(in_band),
                root_interval: min_root_interval(t, p, eps0).ok(),
            }
        }
    };
    Ok(Convergence {
        terminal_x: x,
        converged: terminal == Terminal::Converged,
        certificate,
        trajectory: run.trajectory(terminal),
    })
}
