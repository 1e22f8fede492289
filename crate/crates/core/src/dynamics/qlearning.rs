//! Discrete-time Q-learning with Boltzmann exploration.
//!
//! Each round the population plays `x_k = sigma((Q_W - Q_S) / T)`, then both
//! Q-values move toward the realized payoffs with step `delta`. For small
//! `delta` this tracks the continuous field at rescaled time `k * delta / T`.

use super::{Sample, Terminal, Trajectory};
use crate::error::{Error, Result};
use crate::game::{payoffs_unchecked, GameParams};
use crate::qre::{logistic, logit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QLearningConfig {
    pub delta: f64,
    pub steps: usize,
    /// Initial `(Q_W, Q_S)`. When `None`, `Q_S = u_S(x0)` and `Q_W` is set so
    /// that the first round plays exactly `x0`.
    pub q_init: Option<(f64, f64)>,
    pub conv_tol: f64,
    pub conv_window: usize,
}

impl Default for QLearningConfig {
    fn default() -> Self {
        QLearningConfig {
            delta: 0.01,
            steps: 100_000,
            q_init: None,
            conv_tol: 1e-12,
            conv_window: 100,
        }
    }
}

/// Runs the map from `x0`; sample `k` holds `x_k` at time `k`.
pub fn discrete_q_learning(x0: f64, t: f64, p: &GameParams, cfg: &QLearningConfig) -> Result<Trajectory> {
    if t == 0.0 {
        return Err(Error::UndefinedRegime(
            "Boltzmann exploration is undefined at T = 0".into(),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("T", "must be positive and finite"));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::domain("x0", format!("{x0} outside (0, 1)")));
    }
    if !(cfg.delta > 0.0 && cfg.delta <= 1.0) {
        return Err(Error::domain("delta", "learning rate must lie in (0, 1]"));
    }
    if cfg.steps == 0 {
        return Err(Error::domain("steps", "must be at least 1"));
    }
    let (mut q_w, mut q_s) = cfg.q_init.unwrap_or_else(|| {
        let q_s = payoffs_unchecked(x0, p).s;
        (q_s + t * logit(x0), q_s)
    });
    if !(q_w.is_finite() && q_s.is_finite()) {
        return Err(Error::domain("q_init", "Q-values must be finite"));
    }

    let mut x = logistic((q_w - q_s) / t);
    let mut samples = Vec::with_capacity(cfg.steps.min(1 << 20) + 1);
    samples.push(Sample { t: 0.0, x });
    let mut calm = 0;
    let mut terminal = Terminal::MaxTime;
    for k in 1..=cfg.steps {
        let u = payoffs_unchecked(x, p);
        q_w += cfg.delta * (u.w - q_w);
        q_s += cfg.delta * (u.s - q_s);
        let next = logistic((q_w - q_s) / t);
        calm = if (next - x).abs() < cfg.conv_tol { calm + 1 } else { 0 };
        x = next;
        samples.push(Sample { t: k as f64, x });
        if calm >= cfg.conv_window {
            terminal = Terminal::Converged;
            break;
        }
    }
    Ok(Trajectory {
        samples,
        terminal,
        terminal_x: x,
    })
}
