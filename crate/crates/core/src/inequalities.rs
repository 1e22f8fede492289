//! Dense-grid checks of the auxiliary inequalities behind the uniqueness,
//! robustness and displacement results. Each check reports its worst margin
//! (largest value of `lhs - rhs` for an `lhs <= rhs` claim) and, where the
//! bound is tight, the gap at the equality point.

use serde::Serialize;

use crate::dynamics::PerturbationSpec;
use crate::error::Result;
use crate::game::GameParams;
use crate::qre::{drift_derivative, drift_unchecked, find_qre};

/// Largest admissible violation of an inequality.
pub const VIOLATION_TOL: f64 = 1e-12;
/// Largest admissible gap at an equality case.
pub const EQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub samples: usize,
    /// `max(lhs - rhs)`; nonpositive when the inequality holds.
    pub worst_margin: f64,
    /// Grid point (up to three coordinates) where the worst margin occurs.
    pub worst_at: Vec<f64>,
    /// `|lhs - rhs|` at the equality case, when there is one.
    pub equality_gap: Option<f64>,
    pub passed: bool,
}

struct Tracker {
    samples: usize,
    worst: f64,
    at: Vec<f64>,
}

impl Tracker {
    fn new() -> Self {
        Tracker {
            samples: 0,
            worst: f64::NEG_INFINITY,
            at: Vec::new(),
        }
    }

    fn push(&mut self, margin: f64, at: &[f64]) {
        self.samples += 1;
        if margin > self.worst || margin.is_nan() {
            self.worst = margin;
            self.at = at.to_vec();
        }
    }

    fn finish(self, name: &'static str, statement: &'static str, equality_gap: Option<f64>) -> InequalityCheck {
        let passed = self.worst <= VIOLATION_TOL && equality_gap.is_none_or(|g| g <= EQUALITY_TOL);
        InequalityCheck {
            name,
            statement,
            samples: self.samples,
            worst_margin: self.worst,
            worst_at: self.at,
            equality_gap,
            passed,
        }
    }
}

/// Interior grid of `n` points on `(0, 1)`, with 1/2 included when `n` is odd.
fn unit_grid(n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |i| i as f64 / (n + 1) as f64)
}

const ALPHAS: [f64; 9] = [2.0, 2.25, 2.5, 3.0, 4.0, 5.5, 8.0, 16.0, 40.0];

fn tail_power(x: f64) -> f64 {
    (1.0 - 1.0 / x).powf(x - 1.0)
}

fn tail_power_decreasing(n: usize) -> InequalityCheck {
    let mut tr = Tracker::new();
    let xs: Vec<f64> = (0..=n).map(|i| 1.0 + 1e-3 + 100.0 * i as f64 / n as f64).collect();
    for w in xs.windows(2) {
        tr.push(tail_power(w[1]) - tail_power(w[0]), &[w[0], w[1]]);
    }
    tr.finish(
        "tail_power_decreasing",
        "(1 - 1/x)^(x - 1) is decreasing on (1, inf)",
        Some((tail_power(2.0) - 0.5).abs()),
    )
}

fn tail_power_at_most_half(n: usize) -> InequalityCheck {
    let mut tr = Tracker::new();
    for i in 0..n {
        let x = 2.0 + 100.0 * i as f64 / n as f64;
        tr.push(tail_power(x) - 0.5, &[x]);
    }
    tr.finish(
        "tail_power_at_most_half",
        "(1 - 1/x)^(x - 1) <= 1/2 for x >= 2",
        Some((tail_power(2.0) - 0.5).abs()),
    )
}

fn skew_product_bound(n: usize) -> InequalityCheck {
    let mut tr = Tracker::new();
    let lhs = |a: f64, p: f64| p.powf(a - 1.0) * (1.0 - p);
    for a in ALPHAS {
        for p in unit_grid(n) {
            tr.push(lhs(a, p) - 1.0 / (2.0 * a), &[a, p]);
        }
    }
    tr.finish(
        "skew_product_bound",
        "p^(a-1) (1-p) <= 1/(2a) for a >= 2",
        Some((lhs(2.0, 0.5) - 0.25).abs()),
    )
}

fn symmetric_product_bound(n: usize) -> InequalityCheck {
    let mut tr = Tracker::new();
    let lhs = |a: f64, p: f64| p.powf(a) * (1.0 - p) + p * (1.0 - p).powf(a);
    for a in ALPHAS {
        for p in unit_grid(n) {
            tr.push(lhs(a, p) - 1.0 / (2.0 * a), &[a, p]);
        }
    }
    tr.finish(
        "symmetric_product_bound",
        "p^a (1-p) + p (1-p)^a <= 1/(2a) for a >= 2",
        Some((lhs(2.0, 0.5) - 0.25).abs()),
    )
}

fn power_sum_minimum(n: usize) -> InequalityCheck {
    let mut tr = Tracker::new();
    let lhs = |a: f64, x: f64| x.powf(a) + (1.0 - x).powf(a);
    for a in [1.01, 1.5].into_iter().chain(ALPHAS) {
        for x in unit_grid(n) {
            tr.push(0.5f64.powf(a - 1.0) - lhs(a, x), &[a, x]);
        }
    }
    tr.finish(
        "power_sum_minimum",
        "x^a + (1-x)^a >= 2^(1-a) for a > 1",
        Some((lhs(2.0, 0.5) - 0.5).abs()),
    )
}

fn drift_slope_bound(n: usize) -> Result<InequalityCheck> {
    let mut tr = Tracker::new();
    let p = GameParams::bilinear(0.3)?;
    for t in [0.0, 0.05, 0.2, 0.3, 0.5, 1.0, 3.0] {
        for x in unit_grid(n) {
            tr.push(drift_derivative(x, t, &p)? - (2.0 - 4.0 * t), &[t, x]);
        }
    }
    let gap = (drift_derivative(0.5, 0.2, &p)? - (2.0 - 4.0 * 0.2)).abs();
    Ok(tr.finish(
        "drift_slope_bound",
        "f'(x) <= 2 - 4T for a = 2, maximal at x = 1/2",
        Some(gap),
    ))
}

fn steep_drift_decreasing(n: usize) -> Result<InequalityCheck> {
    let mut tr = Tracker::new();
    for a in [3.0, 3.5, 4.0, 6.0, 10.0] {
        let p = GameParams::new(0.4, a)?;
        for t in [0.5, 0.75, 2.0] {
            for x in unit_grid(n) {
                tr.push(drift_derivative(x, t, &p)?, &[a, t, x]);
            }
        }
    }
    let gap = drift_derivative(0.5, 0.5, &GameParams::new(0.4, 3.0)?)?.abs();
    Ok(tr.finish(
        "steep_drift_decreasing",
        "f'(x) <= 0 for a >= 3 and T >= 1/2",
        Some(gap),
    ))
}

fn drift_envelope(n: usize) -> Result<InequalityCheck> {
    let mut tr = Tracker::new();
    let (gamma, eps0) = (0.3, 0.1);
    let p = GameParams::bilinear(gamma)?;
    let (lo, hi) = (p.with_gamma(gamma + eps0), p.with_gamma(gamma - eps0));
    for seed in 0..4u64 {
        let e = PerturbationSpec::smooth_random(eps0, seed).realize()?;
        for t in [0.05, 0.3] {
            for x in unit_grid(n / 4) {
                let v = drift_unchecked(x, t, &p) + e.sample(x);
                let margin = (drift_unchecked(x, t, &lo) - v).max(v - drift_unchecked(x, t, &hi));
                tr.push(margin, &[seed as f64, t, x]);
            }
        }
    }
    // A constant bias of +eps0 sits on the upper edge.
    let bias = drift_unchecked(0.3, 0.2, &p) + eps0 - drift_unchecked(0.3, 0.2, &hi);
    Ok(tr.finish(
        "drift_envelope",
        "f(x; gamma + e0) <= f(x; gamma) + eps(x) <= f(x; gamma - e0)",
        Some(bias.abs()),
    ))
}

fn root_displacement(n: usize) -> Result<InequalityCheck> {
    let mut tr = Tracker::new();
    let gamma = 0.3;
    let p = GameParams::bilinear(gamma)?;
    let per = (n / 3).max(1);
    for eps in [0.01, 0.05, 0.1] {
        for i in 0..per {
            let t = 0.005 + 1.995 * i as f64 / per as f64;
            if (t - 0.5).abs() <= 0.05 {
                continue;
            }
            let lo = find_qre(t, &p.with_gamma(gamma + eps))?.min_root();
            let hi = find_qre(t, &p.with_gamma(gamma - eps))?.min_root();
            let bound = (eps / (1.0 - 2.0 * t).abs()).min(0.5);
            tr.push((hi - lo).abs() - bound, &[eps, t]);
        }
    }
    Ok(tr.finish(
        "root_displacement",
        "|x*(gamma - e) - x*(gamma + e)| <= min(e / |1 - 2T|, 1/2)",
        None,
    ))
}

/// Runs every check on grids of about `n` points per parameter slice.
pub fn inequality_suite(n: usize) -> Result<Vec<InequalityCheck>> {
    let n = n.max(3);
    Ok(vec![
        tail_power_decreasing(n),
        tail_power_at_most_half(n),
        skew_product_bound(n),
        symmetric_product_bound(n),
        power_sum_minimum(n),
        drift_slope_bound(n)?,
        steep_drift_decreasing(n)?,
        drift_envelope(n)?,
        root_displacement(n)?,
    ])
}
