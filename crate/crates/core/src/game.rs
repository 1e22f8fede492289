//! The two-technology population game.
//!
//! A population of capital `K` splits between a wasteful technology `W`
//! (fraction `x`) and an efficient technology `S`. Each technology creates
//! value `V·(share·K)^alpha`, split evenly across invested units, and `W`
//! carries a per-unit cost. After normalizing `V·K^(alpha-1)` to one the
//! payoffs are
//!
//! ```text
//! u_W(x) = x^(alpha-1) - gamma,    u_S(x) = (1 - x)^(alpha-1)
//! ```
//!
//! and every control level `T` used downstream is in the same units.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots;

/// Normalized game parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams {
    /// Per-unit cost of `W`, divided by `value_scale`.
    pub gamma: f64,
    /// Network-effect exponent.
    pub alpha: f64,
    /// Raw `V·K^(alpha-1)`. Raw control levels must be divided by this.
    pub value_scale: f64,
    /// Raw capital `K`, used only for the aggregate payoff.
    pub capital: f64,
    pub normalized: bool,
}

impl GameParams {
    /// Parameters already expressed in normalized units.
    pub fn new(gamma: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_gamma(gamma)?;
        Ok(GameParams {
            gamma,
            alpha,
            value_scale: 1.0,
            capital: 1.0,
            normalized: true,
        })
    }

    /// The bilinear game (alpha = 2).
    pub fn bilinear(gamma: f64) -> Result<Self> {
        Self::new(gamma, 2.0)
    }

    pub fn is_bilinear(&self) -> bool {
        self.alpha == 2.0
    }

    /// Converts a raw control level into normalized units.
    pub fn normalize_temperature(&self, raw_t: f64) -> f64 {
        raw_t / self.value_scale
    }

    /// Same game with a shifted cost, used for perturbation envelopes.
    pub(crate) fn with_gamma(&self, gamma: f64) -> Self {
        GameParams { gamma, ..*self }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::domain("alpha", "must be finite"));
    }
    if alpha < 1.0 {
        return Err(Error::UnsupportedRegime(
            "subadditive regime unsupported (alpha must be >= 1)".into(),
        ));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(
            "gamma",
            format!("normalized cost {gamma} must lie in (0, 1)"),
        ));
    }
    Ok(())
}

/// Builds normalized parameters from raw cost, value and capital.
pub fn normalize_params(raw_gamma: f64, raw_v: f64, raw_k: f64, alpha: f64) -> Result<GameParams> {
    check_alpha(alpha)?;
    if !(raw_v > 0.0 && raw_v.is_finite()) {
        return Err(Error::domain("V", "must be positive"));
    }
    if !(raw_k > 0.0 && raw_k.is_finite()) {
        return Err(Error::domain("K", "must be positive"));
    }
    if !(raw_gamma > 0.0) {
        return Err(Error::domain("gamma", "raw cost must be positive"));
    }
    let value_scale = raw_v * raw_k.powf(alpha - 1.0);
    let gamma = raw_gamma / value_scale;
    check_gamma(gamma)?;
    Ok(GameParams {
        gamma,
        alpha,
        value_scale,
        capital: raw_k,
        normalized: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Payoffs {
    pub w: f64,
    pub s: f64,
}

impl Payoffs {
    pub fn advantage(&self) -> f64 {
        self.w - self.s
    }
}

fn check_state(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("x", format!("population state {x} outside [0, 1]")));
    }
    Ok(())
}

pub fn payoffs(x: f64, p: &GameParams) -> Result<Payoffs> {
    check_state(x)?;
    Ok(payoffs_unchecked(x, p))
}

#[inline]
pub(crate) fn payoffs_unchecked(x: f64, p: &GameParams) -> Payoffs {
    if p.is_bilinear() {
        Payoffs {
            w: x - p.gamma,
            s: 1.0 - x,
        }
    } else {
        let e = p.alpha - 1.0;
        Payoffs {
            w: x.powf(e) - p.gamma,
            s: (1.0 - x).powf(e),
        }
    }
}

/// `u_W(x) - u_S(x)`, the payoff advantage of the wasteful technology.
#[inline]
pub(crate) fn advantage(x: f64, one_minus_x: f64, p: &GameParams) -> f64 {
    if p.is_bilinear() {
        x - one_minus_x - p.gamma
    } else {
        let e = p.alpha - 1.0;
        x.powf(e) - one_minus_x.powf(e) - p.gamma
    }
}

/// Average payoff `x·u_W + (1-x)·u_S` in normalized units.
pub fn average_payoff(x: f64, p: &GameParams) -> Result<f64> {
    let u = payoffs(x, p)?;
    Ok(x * u.w + (1.0 - x) * u.s)
}

/// Aggregate payoff `K·ū(x)` in raw units.
pub fn aggregate_payoff(x: f64, p: &GameParams) -> Result<f64> {
    Ok(p.capital * p.value_scale * average_payoff(x, p)?)
}

/// Payoff to a mutant playing mixed strategy `y` against population `x`.
pub fn strategy_payoff(y: f64, x: f64, p: &GameParams) -> Result<f64> {
    check_state(y)?;
    let u = payoffs(x, p)?;
    Ok(y * u.w + (1.0 - y) * u.s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EssLabel {
    Stable,
    NotStable,
    NotClassified,
}

impl EssLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            EssLabel::Stable => "stable",
            EssLabel::NotStable => "not_stable",
            EssLabel::NotClassified => "not_classified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NashEquilibrium {
    pub x: f64,
    pub average_payoff: f64,
    pub ess: EssLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashProfile {
    pub equilibria: Vec<NashEquilibrium>,
    /// Set when alpha = 1: `S` strictly dominates and only `x = 0` survives.
    pub degenerate: bool,
}

impl NashProfile {
    pub fn mixed(&self) -> Option<&NashEquilibrium> {
        self.equilibria.iter().find(|e| e.x > 0.0 && e.x < 1.0)
    }
}

/// Interior indifference point `u_W(x) = u_S(x)`, which lies in `(1/2, 1)` for alpha > 1.
pub fn mixed_equilibrium(p: &GameParams) -> Option<f64> {
    if p.alpha <= 1.0 {
        return None;
    }
    if p.is_bilinear() {
        return Some((1.0 + p.gamma) / 2.0);
    }
    let g = |x: f64| advantage(x, 1.0 - x, p);
    // g(1/2) = -gamma < 0 and g(1) = 1 - gamma > 0, increasing in between.
    roots::bisect(g, 0.5, 1.0, 200).ok().map(|r| r.root)
}

/// Nash equilibria of the game at T = 0.
pub fn nash_equilibria(p: &GameParams) -> Result<NashProfile> {
    let avg = |x: f64| average_payoff(x, p);
    if p.alpha == 1.0 {
        return Ok(NashProfile {
            equilibria: vec![NashEquilibrium {
                x: 0.0,
                average_payoff: avg(0.0)?,
                ess: EssLabel::NotClassified,
            }],
            degenerate: true,
        });
    }
    let (pure, mixed) = if p.is_bilinear() {
        (EssLabel::Stable, EssLabel::NotStable)
    } else {
        (EssLabel::NotClassified, EssLabel::NotClassified)
    };
    let x_mid = mixed_equilibrium(p)
        .ok_or_else(|| Error::domain("alpha", "no interior equilibrium"))?;
    Ok(NashProfile {
        equilibria: vec![
            NashEquilibrium {
                x: 0.0,
                average_payoff: avg(0.0)?,
                ess: pure,
            },
            NashEquilibrium {
                x: x_mid,
                average_payoff: avg(x_mid)?,
                ess: mixed,
            },
            NashEquilibrium {
                x: 1.0,
                average_payoff: avg(1.0)?,
                ess: pure,
            },
        ],
        degenerate: false,
    })
}

/// ESS margin of the mixed equilibrium against an invading population state:
/// `u(x_mixed, probe) - u(probe, probe)`. Negative means the mixed point fails
/// the ESS test. Only defined for the bilinear game.
pub fn mixed_ess_margin(probe: f64, p: &GameParams) -> Result<Option<f64>> {
    if !p.is_bilinear() {
        return Ok(None);
    }
    let x_mid = (1.0 + p.gamma) / 2.0;
    Ok(Some(
        strategy_payoff(x_mid, probe, p)? - strategy_payoff(probe, probe, p)?,
    ))
}
