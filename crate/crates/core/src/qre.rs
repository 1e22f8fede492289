//! Quantal response equilibria of the Q-learning dynamics.
//!
//! The rest points of `x' = x(1-x) f(x; T, gamma)` in `(0, 1)` are the roots of
//! the drift
//!
//! ```text
//! f(x; T, gamma) = x^(alpha-1) - (1-x)^(alpha-1) - gamma - T ln(x / (1-x))
//! ```
//!
//! which for alpha = 2 is `2x - (1 + gamma) - T ln(x / (1-x))`.
//!
//! Roots are isolated and refined in logit coordinates `y = ln(x / (1-x))`.
//! The map is monotone, so brackets and stability carry over unchanged, and
//! it keeps the lower root (which behaves like `exp(-(1 + gamma) / T)`)
//! representable for small `T`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{advantage, GameParams};
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Maximum accepted `|f|` at a reported root.
    pub root_tol: f64,
    /// Bisection iteration cap per bracket.
    pub max_iter: usize,
    /// Uniform scan resolution in `x` used when alpha != 2.
    pub scan_points: usize,
    /// Half-width of the band around `T_c` reported as a fold.
    pub fold_band: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            root_tol: 1e-9,
            max_iter: 4000,
            scan_points: 10_000,
            fold_band: 1e-9,
        }
    }
}

/// `ln(x / (1 - x))`.
#[inline]
pub fn logit(x: f64) -> f64 {
    x.ln() - (-x).ln_1p()
}

/// Returns `(x, 1 - x)` for `x = 1 / (1 + exp(-y))` without cancellation.
#[inline]
pub(crate) fn logistic_pair(y: f64) -> (f64, f64) {
    if y >= 0.0 {
        let e = (-y).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = y.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

#[inline]
pub fn logistic(y: f64) -> f64 {
    logistic_pair(y).0
}

fn check_temperature(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain("T", format!("control level {t} must be finite and >= 0")));
    }
    Ok(())
}

fn check_interior(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain("x", format!("{x} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

/// Drift `f(x; T, gamma)` for `x` in `(0, 1)`.
pub fn drift(x: f64, t: f64, p: &GameParams) -> Result<f64> {
    check_interior(x)?;
    check_temperature(t)?;
    Ok(drift_unchecked(x, t, p))
}

#[inline]
pub(crate) fn drift_unchecked(x: f64, t: f64, p: &GameParams) -> f64 {
    let adv = advantage(x, 1.0 - x, p);
    if t == 0.0 {
        adv
    } else {
        adv - t * logit(x)
    }
}

/// Drift evaluated at `x = logistic(y)`.
#[inline]
pub(crate) fn drift_logit(y: f64, t: f64, p: &GameParams) -> f64 {
    if p.is_bilinear() {
        // 2x - 1 = tanh(y / 2)
        (0.5 * y).tanh() - p.gamma - t * y
    } else {
        let (x, x_c) = logistic_pair(y);
        advantage(x, x_c, p) - t * y
    }
}

/// `d f / d y = f'(x) x (1 - x)`.
#[inline]
fn drift_logit_slope(y: f64, t: f64, p: &GameParams) -> f64 {
    let (x, x_c) = logistic_pair(y);
    let e = p.alpha - 1.0;
    if e == 0.0 {
        return -t;
    }
    e * (x.powf(e) * x_c + x * x_c.powf(e)) - t
}

/// Analytic `d f / d x`.
pub fn drift_derivative(x: f64, t: f64, p: &GameParams) -> Result<f64> {
    check_interior(x)?;
    check_temperature(t)?;
    let entropy = t / (x * (1.0 - x));
    if p.is_bilinear() {
        return Ok(2.0 - entropy);
    }
    let e = p.alpha - 1.0;
    if e == 0.0 {
        return Ok(-entropy);
    }
    Ok(e * (x.powf(e - 1.0) + (1.0 - x).powf(e - 1.0)) - entropy)
}

/// Stationary points of the bilinear drift, `x_l <= 1/2 <= x_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPoints {
    pub x_l: f64,
    pub x_u: f64,
}

/// Turning points `(1 -+ sqrt(1 - 2T)) / 2`; `None` when `T > 1/2`.
pub fn turning_points(t: f64) -> Option<TurningPoints> {
    if !(0.0..=0.5).contains(&t) {
        return None;
    }
    let s = (1.0 - 2.0 * t).sqrt();
    // (1 - s) / 2 = T / (1 + s), which stays accurate for small T.
    let x_l = t / (1.0 + s);
    Some(TurningPoints { x_l, x_u: 1.0 - x_l })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QrePoint {
    pub x: f64,
    /// `ln(x / (1 - x))`, exact even where `x` rounds to 0 or 1.
    pub logit: f64,
    pub stability: Stability,
    /// Interval in `x` that isolated the root.
    pub bracket: (f64, f64),
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QreSet {
    pub temperature: f64,
    /// Ascending in `x`.
    pub points: Vec<QrePoint>,
    /// `T` lies within the fold band around the critical level; the upper
    /// pair has merged into a single unstable point.
    pub at_fold: bool,
}

impl QreSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest equilibrium.
    pub fn min_root(&self) -> f64 {
        self.points.first().map_or(f64::NAN, |q| q.x)
    }

    pub fn stable(&self) -> impl Iterator<Item = &QrePoint> {
        self.points.iter().filter(|q| q.stability == Stability::Stable)
    }

    /// Index of the point closest to `x`.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        self.points
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.x - x).abs().total_cmp(&(b.1.x - x).abs()))
            .map(|(i, _)| i)
    }
}

/// All QRE at control level `T`.
pub fn find_qre(t: f64, p: &GameParams) -> Result<QreSet> {
    find_qre_with(t, p, &SolverOptions::default())
}

pub fn find_qre_with(t: f64, p: &GameParams, opts: &SolverOptions) -> Result<QreSet> {
    check_temperature(t)?;
    if t == 0.0 {
        return Ok(nash_rest_points(p));
    }

    if p.is_bilinear() && t < 0.5 {
        let tc = critical_temperature(p.gamma)?;
        if (t - tc.t_c).abs() <= opts.fold_band {
            return fold_set(t, p, &tc, opts);
        }
    }

    let (y_lo, y_hi) = logit_bounds(t, p);
    let mut breaks = vec![y_lo];
    if p.is_bilinear() {
        if t < 0.5 {
            let y_u = 2.0 * (1.0 - 2.0 * t).sqrt().atanh();
            breaks.extend([-y_u, y_u].into_iter().filter(|y| *y > y_lo && *y < y_hi));
        }
    } else {
        breaks.extend(slope_sign_changes(t, p, y_lo, y_hi, opts)?);
    }
    breaks.push(y_hi);

    let f = |y: f64| drift_logit(y, t, p);
    let mut points = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            // Root exactly on an interior breakpoint is a tangency.
            if points.last().is_none_or(|q: &(f64, QrePoint)| q.0 != a) && a != y_lo {
                points.push((a, make_point(a, (a, a), Stability::Unstable, t, p, opts)?));
            }
            continue;
        }
        if fa.signum() == fb.signum() || fb == 0.0 {
            continue;
        }
        let r = bisect(f, a, b, opts.max_iter)?;
        let stability = if fa > 0.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        };
        points.push((r.root, make_point(r.root, (a, b), stability, t, p, opts)?));
    }
    Ok(QreSet {
        temperature: t,
        points: points.into_iter().map(|(_, q)| q).collect(),
        at_fold: false,
    })
}

fn make_point(
    y: f64,
    bracket: (f64, f64),
    stability: Stability,
    t: f64,
    p: &GameParams,
    opts: &SolverOptions,
) -> Result<QrePoint> {
    let x = logistic(y);
    let residual = drift_logit(y, t, p).abs();
    if !(residual <= opts.root_tol) {
        return Err(Error::Residual {
            x,
            residual,
            tolerance: opts.root_tol,
        });
    }
    Ok(QrePoint {
        x,
        logit: y,
        stability,
        bracket: (logistic(bracket.0), logistic(bracket.1)),
        residual,
    })
}

/// Logit interval outside of which `f` has a fixed sign: the payoff advantage
/// is confined to `[-1 - gamma, 1 - gamma]`.
fn logit_bounds(t: f64, p: &GameParams) -> (f64, f64) {
    const CAP: f64 = 1e300;
    let lo = -(1.0 + p.gamma) / t - 1.0;
    let hi = (1.0 - p.gamma) / t + 1.0;
    (lo.max(-CAP), hi.min(CAP))
}

/// Rest points of the replicator field at T = 0.
fn nash_rest_points(p: &GameParams) -> QreSet {
    let exact = |x: f64, stability| QrePoint {
        x,
        logit: (x / (1.0 - x)).ln(),
        stability,
        bracket: (x, x),
        residual: 0.0,
    };
    let points = match crate::game::mixed_equilibrium(p) {
        Some(x_mid) => vec![
            exact(0.0, Stability::Stable),
            QrePoint {
                residual: advantage(x_mid, 1.0 - x_mid, p).abs(),
                ..exact(x_mid, Stability::Unstable)
            },
            exact(1.0, Stability::Stable),
        ],
        // alpha = 1: S dominates, x = 1 survives only as a repelling boundary.
        None => vec![exact(0.0, Stability::Stable), exact(1.0, Stability::Unstable)],
    };
    QreSet {
        temperature: 0.0,
        points,
        at_fold: false,
    }
}

fn fold_set(t: f64, p: &GameParams, tc: &CriticalPoint, opts: &SolverOptions) -> Result<QreSet> {
    let (y_lo, _) = logit_bounds(t, p);
    let y_l = -2.0 * (1.0 - 2.0 * t).sqrt().atanh();
    let f = |y: f64| drift_logit(y, t, p);
    let r = bisect(f, y_lo, y_l, opts.max_iter)?;
    let lower = make_point(r.root, (y_lo, y_l), Stability::Stable, t, p, opts)?;
    let x_fold = tc.x_fold;
    let upper = QrePoint {
        x: x_fold,
        logit: logit(x_fold),
        stability: Stability::Unstable,
        bracket: (x_fold, x_fold),
        residual: drift_unchecked(x_fold, t, p).abs(),
    };
    Ok(QreSet {
        temperature: t,
        points: vec![lower, upper],
        at_fold: true,
    })
}

/// Scan grid in logit coordinates: uniform in `x` on `(0, 1)` plus geometric
/// tails out to the sign bounds.
fn scan_grid(y_lo: f64, y_hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let inner_lo = logit(1.0 / n as f64);
    let mut left = Vec::new();
    let mut y = inner_lo * 1.05;
    while y > y_lo {
        left.push(y);
        y *= 1.05;
    }
    let mut grid: Vec<f64> = left.into_iter().rev().collect();
    grid.extend((1..n).map(|i| logit(i as f64 / n as f64)));
    let mut y = -inner_lo * 1.05;
    while y < y_hi {
        grid.push(y);
        y *= 1.05;
    }
    grid.retain(|y| *y > y_lo && *y < y_hi);
    grid
}

/// Local extrema of `f` in logit coordinates, found as sign changes of the slope.
fn slope_sign_changes(
    t: f64,
    p: &GameParams,
    y_lo: f64,
    y_hi: f64,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let slope = |y: f64| drift_logit_slope(y, t, p);
    let grid = scan_grid(y_lo, y_hi, opts.scan_points);
    let mut out = Vec::new();
    let mut prev = (grid[0], slope(grid[0]));
    for &y in &grid[1..] {
        let s = slope(y);
        if s == 0.0 {
            out.push(y);
        } else if prev.1 != 0.0 && s.signum() != prev.1.signum() {
            out.push(bisect(slope, prev.0, y, opts.max_iter)?.root);
        }
        prev = (y, s);
    }
    Ok(out)
}

/// Location of the saddle-node bifurcation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub gamma: f64,
    pub t_c: f64,
    /// Upper turning point `x_u(T_c)`, where the two upper QRE merge.
    pub x_fold: f64,
}

/// Critical level `T_c(gamma)` of the bilinear game.
///
/// With `u = sqrt(1 - 2T)`, the fold condition `f(x_u(T); T, gamma) = 0`
/// becomes `g(u) = u - gamma - (1 - u^2) atanh(u) = 0`, strictly increasing on
/// `(0, 1)` with `g(0) = -gamma` and `g(1-) = 1 - gamma`.
pub fn critical_temperature(gamma: f64) -> Result<CriticalPoint> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain("gamma", format!("{gamma} must lie in (0, 1)")));
    }
    let g = |u: f64| u - gamma - (1.0 - u) * (1.0 + u) * u.atanh();
    let top = 1.0 - f64::EPSILON / 2.0;
    let u = bisect(g, 0.0, top, 200)?.root;
    Ok(CriticalPoint {
        gamma,
        t_c: 0.5 * (1.0 - u) * (1.0 + u),
        x_fold: 0.5 * (1.0 + u),
    })
}

/// Largest `T` at which an equilibrium above the mixed Nash point survives,
/// for any alpha > 1. Upper roots disappear monotonically in `T` because `f`
/// is decreasing in `T` wherever `x > 1/2`.
pub fn upper_fold(p: &GameParams) -> Result<Option<CriticalPoint>> {
    let Some(x_mid) = crate::game::mixed_equilibrium(p) else {
        return Ok(None);
    };
    let y_mid = logit(x_mid);
    // Beyond this level f < 0 on (x_mid, 1).
    let t_hi = (1.0 - p.gamma) / y_mid;
    let mut lo = 0.0;
    let mut hi = t_hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if upper_max(mid, p, y_mid).1 >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (y_star, _) = upper_max(lo, p, y_mid);
    Ok(Some(CriticalPoint {
        gamma: p.gamma,
        t_c: lo,
        x_fold: logistic(y_star),
    }))
}

/// Maximum of `f` over `y >= y_mid`, as `(argmax, max)`.
fn upper_max(t: f64, p: &GameParams, y_mid: f64) -> (f64, f64) {
    let (_, y_hi) = logit_bounds(t, p);
    let f = |y: f64| drift_logit(y, t, p);
    let x_mid = logistic(y_mid);
    let n = 4000;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| logit(x_mid + (1.0 - x_mid) * i as f64 / n as f64))
        .collect();
    let mut y = grid[n - 1].max(1.0) * 1.05;
    while y < y_hi {
        grid.push(y);
        y *= 1.05;
    }
    let (k, _) = grid
        .iter()
        .enumerate()
        .map(|(i, y)| (i, f(*y)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let mut a = grid[k.saturating_sub(1)];
    let mut b = grid[(k + 1).min(grid.len() - 1)];
    // Golden-section refinement.
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    let y_star = 0.5 * (a + b);
    (y_star, f(y_star))
}

/// Control level that makes `x` an equilibrium of the bilinear game,
/// `T(x) = (2x - 1 - gamma) / ln(x / (1 - x))`. `None` on `[1/2, (1+gamma)/2)`,
/// where no nonnegative level exists.
pub fn t_of_x(x: f64, gamma: f64) -> Result<Option<f64>> {
    check_interior(x)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain("gamma", format!("{gamma} must lie in (0, 1)")));
    }
    if x == 0.5 {
        return Ok(None);
    }
    let num = (2.0 * x - 1.0) - gamma;
    if num.abs() <= 4.0 * f64::EPSILON {
        return Ok(Some(0.0));
    }
    let t = num / logit(x);
    Ok(if t >= 0.0 { Some(t) } else { None })
}

/// `x - sigma((u_W - u_S) / T)`: zero exactly at the QRE.
pub fn boltzmann_residual(x: f64, t: f64, p: &GameParams) -> Result<f64> {
    check_interior(x)?;
    check_temperature(t)?;
    if t == 0.0 {
        return Err(Error::UndefinedRegime(
            "Boltzmann choice is undefined at T = 0".into(),
        ));
    }
    let z = advantage(x, 1.0 - x, p) / t;
    Ok(x - logistic(z))
}

/// Boltzmann identity in logit form, `y - A(x) / T` with `x = logistic(y)`.
/// Defined for every finite `y`, unlike the form in `x`.
pub fn boltzmann_residual_logit(y: f64, t: f64, p: &GameParams) -> Result<f64> {
    check_temperature(t)?;
    if !y.is_finite() {
        return Err(Error::domain("y", format!("{y} must be finite")));
    }
    if t == 0.0 {
        return Err(Error::UndefinedRegime(
            "Boltzmann choice is undefined at T = 0".into(),
        ));
    }
    let (x, x_c) = logistic_pair(y);
    Ok(y - advantage(x, x_c, p) / t)
}

/// `[x_min(T; gamma + eps0), x_min(T; gamma - eps0)]`: every drift perturbed by
/// at most `eps0` has its smallest equilibrium in this interval.
pub fn min_root_interval(t: f64, p: &GameParams, eps0: f64) -> Result<(f64, f64)> {
    crate::bounds::check_eps0(eps0, p.gamma)?;
    let lo = find_qre(t, &p.with_gamma(p.gamma + eps0))?.min_root();
    let hi = find_qre(t, &p.with_gamma(p.gamma - eps0))?.min_root();
    Ok((lo, hi))
}
