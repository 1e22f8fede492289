//! Robustness bounds for bounded state-dependent perturbations of the drift.
//!
//! A perturbation `|eps(x)| <= eps0 < min(gamma, 1 - gamma)` shifts the drift
//! by at most `eps0`, which is the same as moving the cost to `gamma -+ eps0`.
//! Everything here follows from that sandwich.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::qre::{critical_temperature, drift, logit, min_root_interval};
#[cfg(test)]
use crate::qre::find_qre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationBounds {
    pub eps0: f64,
    pub gamma: f64,
    pub temperature: f64,
    pub x_query: f64,
    /// `f(x; T, gamma + eps0)`.
    pub f_low: f64,
    /// `f(x; T, gamma - eps0)`.
    pub f_high: f64,
    /// Interval containing the smallest perturbed equilibrium,
    /// `[x_min(T; gamma + eps0), x_min(T; gamma - eps0)]`.
    pub root_interval: (f64, f64),
    /// `min(eps0 / |1 - 2T|, 1/2)`; `None` at `T = 1/2`.
    pub displacement_bound: Option<f64>,
    /// Critical level of the perturbed system is at most `T_c(gamma - eps0)`.
    pub tc_upper_bound: f64,
    /// `eps0 / |ln(1/x - 1)|`; `None` at `x = 1/2`.
    pub t_shift_bound: Option<f64>,
}

/// Checks `eps0` against `(0, min(gamma, 1 - gamma))`.
pub fn check_eps0(eps0: f64, gamma: f64) -> Result<()> {
    let cap = gamma.min(1.0 - gamma);
    if !(eps0 > 0.0 && eps0 < cap) {
        return Err(Error::domain(
            "eps0",
            format!("perturbation amplitude {eps0} must lie in (0, {cap})"),
        ));
    }
    Ok(())
}

/// Envelope `(f(x; T, gamma + eps0), f(x; T, gamma - eps0))` of every perturbed drift.
pub fn envelope(x: f64, t: f64, p: &GameParams, eps0: f64) -> Result<(f64, f64)> {
    check_eps0(eps0, p.gamma)?;
    Ok((
        drift(x, t, &p.with_gamma(p.gamma + eps0))?,
        drift(x, t, &p.with_gamma(p.gamma - eps0))?,
    ))
}

/// All robustness bounds of the bilinear game at `(x_query, T)`.
pub fn perturbation_bounds(x_query: f64, t: f64, gamma: f64, eps0: f64) -> Result<PerturbationBounds> {
    let p = GameParams::bilinear(gamma)?;
    let (f_low, f_high) = envelope(x_query, t, &p, eps0)?;
    let (lo, hi) = min_root_interval(t, &p, eps0)?;
    let gap = (1.0 - 2.0 * t).abs();
    let displacement_bound = (gap > 0.0).then(|| (eps0 / gap).min(0.5));
    let ln_odds = logit(x_query).abs();
    Ok(PerturbationBounds {
        eps0,
        gamma,
        temperature: t,
        x_query,
        f_low,
        f_high,
        root_interval: (lo, hi),
        displacement_bound,
        tc_upper_bound: critical_temperature(gamma - eps0)?.t_c,
        t_shift_bound: (ln_odds > 0.0).then(|| eps0 / ln_odds),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displacement_example() {
        let b = perturbation_bounds(0.3, 0.1, 0.3, 0.05).unwrap();
        assert!((b.displacement_bound.unwrap() - 0.0625).abs() < 1e-15);
        let (lo, hi) = b.root_interval;
        assert!(lo <= hi);
        assert!(hi - lo <= 0.0625);
    }

    #[test]
    fn root_interval_endpoints_match_shifted_games() {
        // Frozen from logit-space bisection at gamma = 0.35 and 0.25.
        let b = perturbation_bounds(0.3, 0.1, 0.3, 0.05).unwrap();
        let lo = find_qre(0.1, &GameParams::bilinear(0.35).unwrap()).unwrap().min_root();
        let hi = find_qre(0.1, &GameParams::bilinear(0.25).unwrap()).unwrap().min_root();
        assert_eq!(b.root_interval, (lo, hi));
    }

    #[test]
    fn collapses_as_amplitude_vanishes() {
        let eps = 1e-12;
        let b = perturbation_bounds(0.4, 0.2, 0.3, eps).unwrap();
        let f = drift(0.4, 0.2, &GameParams::bilinear(0.3).unwrap()).unwrap();
        assert!((b.f_low - f).abs() < 2e-12 && (b.f_high - f).abs() < 2e-12);
        let x_min = find_qre(0.2, &GameParams::bilinear(0.3).unwrap()).unwrap().min_root();
        assert!((b.root_interval.0 - x_min).abs() < 1e-10);
        assert!((b.root_interval.1 - x_min).abs() < 1e-10);
    }

    #[test]
    fn singular_points() {
        let b = perturbation_bounds(0.5, 0.5, 0.3, 0.05).unwrap();
        assert_eq!(b.displacement_bound, None);
        assert_eq!(b.t_shift_bound, None);
        let b = perturbation_bounds(0.9, 0.2, 0.3, 0.05).unwrap();
        assert!((b.t_shift_bound.unwrap() - 0.05 / 9f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_large_amplitude() {
        assert!(perturbation_bounds(0.4, 0.2, 0.3, 0.3).is_err());
        assert!(perturbation_bounds(0.4, 0.2, 0.8, 0.25).is_err());
        assert!(perturbation_bounds(0.4, 0.2, 0.3, 0.0).is_err());
    }

    #[test]
    fn threshold_is_shifted_critical_level() {
        let b = perturbation_bounds(0.3, 0.1, 0.3, 0.05).unwrap();
        assert_eq!(b.tc_upper_bound, critical_temperature(0.25).unwrap().t_c);
        assert!(b.tc_upper_bound > critical_temperature(0.3).unwrap().t_c);
    }
}
