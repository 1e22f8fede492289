//! Sign-change bisection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    /// Final enclosing interval.
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Bisects `f` on `[lo, hi]` until the interval cannot be split further in
/// floating point. `f(lo)` and `f(hi)` must have opposite signs (or one be zero).
pub fn bisect<F>(f: F, lo: f64, hi: f64, max_iter: usize) -> Result<Bisection>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Bisection { root: lo, lo, hi: lo, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Bisection { root: hi, lo: hi, hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoConvergence { lo, hi, iterations: 0 });
    }
    for k in 1..=max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            // Pick the endpoint with the smaller residual.
            let root = if f_lo.abs() <= f(hi).abs() { lo } else { hi };
            return Ok(Bisection { root, lo, hi, iterations: k });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Bisection { root: mid, lo: mid, hi: mid, iterations: k });
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence { lo, hi, iterations: max_iter })
}
