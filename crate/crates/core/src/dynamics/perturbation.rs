//! Bounded state-dependent noise `eps(x)` added to the drift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SMOOTH_KNOTS: usize = 17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Seeded values on a fixed knot grid, joined by smoothstep segments.
    SmoothRandom,
    /// `eps(x) = eps0`.
    ConstantBias,
    /// Piecewise-linear through user `(x, eps)` knots, flat beyond the ends.
    UserTable(Vec<(f64, f64)>),
    /// `0.01 + r x^(1/6) (1 - x)` with seeded `r` in `[0, 0.1]`.
    EdgeDamped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub eps0: f64,
    pub seed: u64,
    pub kind: PerturbationKind,
}

impl PerturbationSpec {
    pub fn smooth_random(eps0: f64, seed: u64) -> Self {
        PerturbationSpec {
            eps0,
            seed,
            kind: PerturbationKind::SmoothRandom,
        }
    }

    pub fn constant_bias(eps0: f64) -> Self {
        PerturbationSpec {
            eps0,
            seed: 0,
            kind: PerturbationKind::ConstantBias,
        }
    }

    /// Draws the seeded coefficients once so `sample` is cheap and pure in `x`.
    pub fn realize(&self) -> Result<Perturbation> {
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(Error::domain("eps0", "amplitude must be positive and finite"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shape = match &self.kind {
            PerturbationKind::SmoothRandom => Shape::Knots(
                (0..SMOOTH_KNOTS)
                    .map(|i| {
                        let x = i as f64 / (SMOOTH_KNOTS - 1) as f64;
                        (x, rng.gen_range(-self.eps0..=self.eps0))
                    })
                    .collect(),
            ),
            PerturbationKind::ConstantBias => Shape::Constant(self.eps0),
            PerturbationKind::UserTable(knots) => {
                if knots.is_empty() {
                    return Err(Error::domain("eps_table", "needs at least one knot"));
                }
                let mut knots = knots.clone();
                if knots.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
                    return Err(Error::domain("eps_table", "knots must be finite"));
                }
                knots.sort_by(|a, b| a.0.total_cmp(&b.0));
                Shape::Linear(knots)
            }
            PerturbationKind::EdgeDamped => Shape::EdgeDamped(rng.gen_range(0.0..=0.1)),
        };
        Ok(Perturbation {
            eps0: self.eps0,
            shape,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Constant(f64),
    Knots(Vec<(f64, f64)>),
    Linear(Vec<(f64, f64)>),
    EdgeDamped(f64),
}

/// A realized perturbation: a deterministic function of `x` with `|eps(x)| <= eps0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    eps0: f64,
    shape: Shape,
}

impl Perturbation {
    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn sample(&self, x: f64) -> f64 {
        let v = match &self.shape {
            Shape::Constant(c) => *c,
            Shape::Knots(k) => interpolate(k, x, |t| t * t * (3.0 - 2.0 * t)),
            Shape::Linear(k) => interpolate(k, x, |t| t),
            Shape::EdgeDamped(r) => 0.01 + r * x.max(0.0).powf(1.0 / 6.0) * (1.0 - x),
        };
        v.clamp(-self.eps0, self.eps0)
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64, ease: impl Fn(f64) -> f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|k| k.0 <= x);
    let (a, b) = (knots[i - 1], knots[i]);
    let t = (x - a.0) / (b.0 - a.0);
    a.1 + (b.1 - a.1) * ease(t)
}

/// `eps(x)` for a spec; realizes the spec on every call.
pub fn sample_perturbation(spec: &PerturbationSpec, x: f64) -> Result<f64> {
    Ok(spec.realize()?.sample(x))
}
